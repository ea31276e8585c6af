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

"""Exception hierarchy. Every error knows the CLI exit code it maps to."""

__all__ = [
    "EXIT_OK", "EXIT_PARSE", "EXIT_DEGENERATE", "EXIT_DOMAIN", "EXIT_NO_CONVERGENCE",
    "OrthantExitError", "ParseError", "DegenerateZero", "DomainError", "NoConvergence",
    "InvalidDistribution", "InvalidSubspace", "ZeroMass", "DimensionMismatch", "Overflow",
    "NotInV", "NotInOrthant", "NotLattice", "StateExplosion",
    "NotInP", "NotMinimal", "NotInEP", "TooLarge",
]

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_DEGENERATE = 3
EXIT_DOMAIN = 4
EXIT_NO_CONVERGENCE = 5


class OrthantExitError(Exception):
    """Base class for all errors raised by orthant_exit."""
    exit_code = EXIT_DOMAIN


class ParseError(OrthantExitError):
    """Malformed input file or command line value."""
    exit_code = EXIT_PARSE


class DegenerateZero(OrthantExitError):
    """The reduced support carries no mass, so inf_Q L = 0.

    The degenerate report (inf_value 0) travels with the exception so callers
    can still print it.
    """
    exit_code = EXIT_DEGENERATE

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NoConvergence(OrthantExitError):
    """An iterative method hit its iteration cap."""
    exit_code = EXIT_NO_CONVERGENCE

    def __init__(self, message, gap=None, iterations=None):
        super().__init__(message)
        self.gap = gap
        self.iterations = iterations


class DomainError(OrthantExitError):
    """Input is well formed but outside the domain of the operation."""
    exit_code = EXIT_DOMAIN


class InvalidDistribution(DomainError):
    pass


class InvalidSubspace(DomainError):
    pass


class ZeroMass(DomainError):
    """No atom of the distribution lies in the requested subspace."""


class DimensionMismatch(DomainError):
    pass


class Overflow(DomainError):
    """An exponential left the float range."""


class NotInV(DomainError):
    pass


class NotInOrthant(DomainError):
    pass


class NotLattice(DomainError):
    pass


class StateExplosion(DomainError):
    pass


class NotInP(DomainError):
    pass


class NotMinimal(DomainError):
    pass


class NotInEP(DomainError):
    pass


class TooLarge(DomainError):
    pass
