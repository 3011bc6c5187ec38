import os, sentgraph

from setuptools import setup, find_packages

with open("README.rst", "r") as f:
    long_descr = f.read()

__version__ = None
if os.path.exists("VERSION"):
    with open("VERSION") as handle:
        for line in handle.readlines():
            line = line.strip()
            if len(line) > 0:
                __version__ = line
                break

setup(
    name=sentgraph.__package_name__,
    version=__version__,
    description=sentgraph.__description__,
    long_description=long_descr,
    url=sentgraph.__url__,
    author=sentgraph.__author__,
    author_email=sentgraph.__email__,
    license=sentgraph.__license__,
    packages=find_packages(exclude=["tests"]),
    python_requires=">=3.8",
    keywords=["summarization", "extractive", "biomedical", "multirank", "rouge", "graph"],
    install_requires=[
      "requests",
      "numpy",
      "scipy",
      "nltk",
      "matplotlib",
      "python-dotenv",
      "setuptools"
    ],
    entry_points={
      "console_scripts": ["sentgraph=sentgraph.cli:main"]
    },
    project_urls={
      "Documentation": "https://sentgraph.readthedocs.io",
      "Source": "https://github.com/sentgraph/sentgraph",
      "Issues": "https://github.com/sentgraph/sentgraph/issues",
    },
    classifiers=[
      "Development Status :: 4 - Beta",
      "Intended Audience :: Science/Research",
      "Topic :: Scientific/Engineering :: Bio-Informatics",
      "Topic :: Text Processing :: Linguistic",
      "Programming Language :: Python",
      "Programming Language :: Python :: 3.8",
      "Programming Language :: Python :: 3.9",
      "Programming Language :: Python :: 3.10",
      "Programming Language :: Python :: 3.11",
      "Programming Language :: Python :: 3.12",
    ]
)
