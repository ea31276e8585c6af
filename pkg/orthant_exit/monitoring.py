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

import logging
from dataclasses import dataclass
from typing import Dict, Optional

from prometheus_client import REGISTRY, CollectorRegistry, Gauge, start_http_server

logger = logging.getLogger(__name__)


@dataclass
class PublishedRate:
    """Last value published for one (start, engine) pair"""
    start: str
    engine: str
    rate: float
    within_bound: bool


class RunMonitor:
    """Class to publish exit rate estimates and run progress to prometheus"""
    def __init__(self, port: Optional[int] = None, registry: Optional[CollectorRegistry] = None):
        self.registry = registry if registry is not None else REGISTRY
        self.rate_metric = Gauge("orthant_exit_rate", "Estimated exit rate", ["start", "engine"], registry=self.registry)
        self.bound_metric = Gauge("orthant_exit_bound", "Infimum of the Laplace transform over the orthant", registry=self.registry)
        self.progress_metric = Gauge("orthant_exit_progress", "Fraction of the run completed", ["stage"], registry=self.registry)
        if port is not None:
            start_http_server(port, registry=self.registry)
            logger.info(f"serving metrics on port {port}")
        self.published: Dict[tuple, PublishedRate] = {}

    def publish(self, report):
        """Publish one RateReport. Labels are the start point joined by commas and the engine name."""
        start = ",".join(str(c) for c in report.start)
        self.published[(start, report.engine)] = PublishedRate(start=start, engine=report.engine,
                                                               rate=report.rate, within_bound=report.within_bound)
        self.rate_metric.labels(start, report.engine).set(report.rate)
        self.bound_metric.set(report.bound)

    def progress(self, done: int, total: int, stage: str = "starts"):
        self.progress_metric.labels(stage).set(done / total if total else 1.0)

    def clear(self):
        "Reset every published rate to zero"
        for start, engine in self.published:
            self.rate_metric.labels(start, engine).set(0)
        self.published = {}
        self.progress_metric.labels("starts").set(0)
