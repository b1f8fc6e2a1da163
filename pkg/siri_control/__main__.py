# Entry point for python -m siri_control
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

import sys
from siri_control.cli import main

sys.exit(main())
