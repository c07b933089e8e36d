import setuptools

from topocell import __version__

with open("README.md") as fh:
    long_description = fh.read()

required_requirements = [
    "numpy>=1.24",
    "scipy>=1.10",
    "numba>=0.58",
    "prettytable>=1.0.0",
    "plotly",
    "kaleido",
    "click",
    "pathvalidate==3.2.3",
    "pillow",
]

setuptools.setup(
    name="topocell",
    version=__version__,
    author="TopoCell developers",
    description="Persistent-homology losses and metrics for multi-class cell layouts",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=("tests",)),
    entry_points={
        "console_scripts": [
            "topocell=topocell.cli:entry_point",
        ]
    },
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: GNU General Public License v3 (GPLv3)",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Image Processing",
    ],
    python_requires=">=3.10",
    install_requires=required_requirements,
    extras_require={
        "test": ["pytest"],
    },
)
