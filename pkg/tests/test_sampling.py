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

import threading

import numpy as np
import pytest

from orthant_exit.sampling import CHUNK_SIZE, chunk_bounds, ordered_map, stream


def test_streams_depend_on_seed_and_chunk_only():
    a = stream(4, 2).random(5)
    assert np.array_equal(a, stream(4, 2).random(5))
    assert not np.array_equal(a, stream(4, 3).random(5))
    assert not np.array_equal(a, stream(5, 2).random(5))
    with pytest.raises(ValueError):
        stream(-1, 0)


def test_chunk_bounds():
    assert chunk_bounds(10, 4) == [(0, 4), (4, 8), (8, 10)]
    assert chunk_bounds(CHUNK_SIZE) == [(0, CHUNK_SIZE)]
    assert chunk_bounds(CHUNK_SIZE + 1)[-1] == (CHUNK_SIZE, CHUNK_SIZE + 1)
    with pytest.raises(ValueError):
        chunk_bounds(0)


@pytest.mark.parametrize("threads", [1, 3])
def test_ordered_map_keeps_input_order(threads):
    seen = []
    results = ordered_map(lambda k: stream(0, k).integers(1000), range(8), threads=threads,
                          progress=lambda done, total: seen.append((done, total)))
    assert results == [stream(0, k).integers(1000) for k in range(8)]
    assert seen == [(k, 8) for k in range(1, 9)]


def test_ordered_map_uses_worker_threads():
    names = ordered_map(lambda _: threading.current_thread().name, range(4), threads=2)
    assert all(name.startswith("orthant-exit-mc") for name in names)
    with pytest.raises(ValueError):
        ordered_map(str, [1], threads=0)
