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

from setuptools import find_packages, setup

setup(name="orthant_exit", version="2.0.0", packages=find_packages(exclude=["tests"]), python_requires=">=3.8", install_requires=["numpy", "scipy", "pydantic>=2", "prometheus-client"], extras_require={"test": ["pytest"]}, entry_points={"console_scripts": ["orthant-exit=orthant_exit.cli:main"]})
