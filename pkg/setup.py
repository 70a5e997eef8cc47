# Copyright 2023 The EdgeGateway Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Setup script."""

import pathlib

from setuptools import find_packages
from setuptools import setup

HERE = pathlib.Path(__file__).parent
README = (HERE / "README.md").read_text()

setup(
    name="edge-gateway",
    description=(
        "ECG triage at the edge with an encrypted, tradeable data ledger."
    ),
    long_description=README,
    long_description_content_type="text/markdown",
    version="0.1.0",
    author="EdgeGateway Authors",
    license="Apache License 2.0",
    install_requires=[
        "absl-py",
        "cryptography",
        "numpy",
        "packaging",
        "PyWavelets",
        "scipy",
        # Don't require tensorflow on MacOS; tensorflow-macos will not
        # satisfy the requirement.
        "tensorflow; platform_system != 'Darwin'",
    ],
    extras_require={
        "tests": [
            "black",
            "flake8",
            "isort",
            "pytest",
            "pytest-cov",
        ],
        # Post-quantum KEM and signature schemes.
        "pq": [
            "liboqs-python",
        ],
    },
    entry_points={
        "console_scripts": [
            "egw=edge_gateway.cli:main",
        ],
    },
    # Supported Python versions
    python_requires=">=3.8",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3 :: Only",
        "Operating System :: Unix",
        "Operating System :: MacOS",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Medical Science Apps.",
        "Topic :: Security :: Cryptography",
    ],
    packages=find_packages(exclude=("*_test.py",)),
)
