# SPDX-FileCopyrightText: Copyright (c) 2024 NVIDIA CORPORATION & AFFILIATES. All rights reserved.
# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""
Reproducible random streams for Monte Carlo runs.

Samples are cut into fixed chunks of CHUNK_SIZE replicates. Chunk k draws from
PCG64 seeded with SeedSequence(seed, spawn_key=(k,)), so what a chunk produces
depends on (seed, k) only. Chunks run on a thread pool and their results are
returned in chunk order, which makes every reduction independent of the
number of threads.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Tuple, TypeVar

import numpy as np

__all__ = ["CHUNK_SIZE", "stream", "chunk_bounds", "ordered_map"]

logger = logging.getLogger(__name__)

CHUNK_SIZE = 4096

T = TypeVar("T")
R = TypeVar("R")


def stream(seed: int, chunk: int) -> np.random.Generator:
    """Generator for one chunk of replicates."""
    if seed < 0 or chunk < 0:
        raise ValueError(f"seed and chunk index must be non-negative, got {seed}, {chunk}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(chunk,))))


def chunk_bounds(samples: int, chunk_size: int = CHUNK_SIZE) -> List[Tuple[int, int]]:
    """[(start, stop)] covering range(samples) in chunks of chunk_size; the last may be shorter."""
    if samples < 1:
        raise ValueError(f"samples must be positive, got {samples}")
    return [(start, min(start + chunk_size, samples)) for start in range(0, samples, chunk_size)]


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: int = 1,
                progress: Optional[Callable[[int, int], None]] = None) -> List[R]:
    """
    Apply fn to every item on a pool of threads and return results in input order.

    progress(done, total) is called from the calling thread as results are collected.
    """
    items = list(items)
    if threads < 1:
        raise ValueError(f"threads must be positive, got {threads}")
    results = []
    if threads == 1:
        for result in map(fn, items):
            results.append(result)
            if progress is not None:
                progress(len(results), len(items))
        return results

    logger.debug(f"running {len(items)} chunks on {threads} threads")
    with ThreadPoolExecutor(max_workers=threads, thread_name_prefix="orthant-exit-mc") as pool:
        for result in pool.map(fn, items):
            results.append(result)
            if progress is not None:
                progress(len(results), len(items))
    return results
