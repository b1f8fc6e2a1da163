# Setup for siri-control
#
# Copyright (C) 2026 the siri-control developers
#
# This file is part of siri-control, optimal protection and vaccination
# for SIRI epidemics.
#
# siri-control is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# siri-control is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with siri-control. If not, see <http://www.gnu.org/licenses/gpl.html>.

from setuptools import setup

with open('README.rst') as f:
    longDescription = f.read()

setup(name='siri-control',
      version='0.1.0',
      description='Optimal protection and vaccination for SIRI epidemics',
      long_description=longDescription,
      license='License :: OSI Approved :: GNU General Public License v3 (GPLv3)',
      classifiers=['Development Status :: 3 - Alpha',
                   'Intended Audience :: Science/Research',
                   'Intended Audience :: Developers',
                   'Programming Language :: Python :: 3.8',
                   'Programming Language :: Python :: 3.9',
                   'Programming Language :: Python :: 3.10',
                   'Programming Language :: Python :: 3.11',
                   'Topic :: Scientific/Engineering'],
      python_requires='>=3.8',
      packages=['siri_control',
                'siri_control.plot'],
      package_data={'siri_control': ['py.typed']},
      zip_safe=False,
      install_requires=["numpy", "scipy", "pandas >= 1.5", "matplotlib", "epyc", ],
      entry_points={'console_scripts': ['siri-control = siri_control.cli:main']},
)
