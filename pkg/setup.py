#!/usr/bin/env python3
# this file specifies how the polyhdiv package is installed, including any necessary dependencies required to run

import os
from setuptools import setup

directory = os.path.abspath(os.path.dirname(__file__))
with open(os.path.join(directory, 'docs', 'README.md'), encoding='utf-8') as f:
  long_description = f.read()

setup(name='polyhdiv',
      version='0.1.0',
      description='H(div) conforming elements on arbitrary polygons, built from Poisson problems',
      license='MIT',
      long_description=long_description,
      long_description_content_type='text/markdown',
      packages = ['polyhdiv'],
      classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License"
      ],
      install_requires=['numpy', 'scipy', 'shapely', 'tqdm', 'tabulate'],
      extras_require={'viz': ['matplotlib'], 'testing': ['pytest']},
      entry_points={'console_scripts': ['polyhdiv=polyhdiv.cli:main']},
      python_requires='>=3.8',
      include_package_data=True)
