# Tests of run artifacts
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

import unittest
import os
import json
import numpy
from tempfile import TemporaryDirectory
from siri_control import *


class ArtifactsTests(unittest.TestCase):

    def setUp(self):
        self._dir = TemporaryDirectory()
        self._scenario = preset(2).withGrid(10.0, 100)
        sc = self._scenario
        u = ControlSignal.fromSegments(sc.grid(), [1.0, 0.2, 0.5, 0.2], [0.0, 0.9, 0.1, 0.0])
        traj = integrate_forward(sc.z0(), u, sc.params, sc.weights, sc.grid())
        self._traj = integrate_costate_backward(traj, sc.params, sc.weights)

    def tearDown(self):
        self._dir.cleanup()

    def _path(self, fn):
        return os.path.join(self._dir.name, fn)


    # ---------- Atomic writes ----------

    def testAtomicWrite(self):
        '''Test writing a file atomically.'''
        path = self._path('a.txt')
        atomic_write(path, lambda fh: fh.write('hello\n'))
        with open(path) as fh:
            self.assertEqual(fh.read(), 'hello\n')
        self.assertEqual(os.listdir(self._dir.name), ['a.txt'])

    def testAtomicWriteFails(self):
        '''Test a failed write leaves the old file and no debris.'''
        path = self._path('a.txt')
        atomic_write(path, lambda fh: fh.write('hello\n'))

        def broken(fh):
            fh.write('partial')
            raise ValueError('broken')

        with self.assertRaises(ValueError):
            atomic_write(path, broken)
        with open(path) as fh:
            self.assertEqual(fh.read(), 'hello\n')
        self.assertEqual(os.listdir(self._dir.name), ['a.txt'])

    def testAtomicWriteNoDirectory(self):
        '''Test writing into a directory that doesn't exist.'''
        with self.assertRaises(OSError):
            atomic_write(self._path('missing/a.txt'), lambda fh: fh.write('hello\n'))


    # ---------- Tables ----------

    def testTrajectory(self):
        '''Test writing and reading back a trajectory.'''
        path = self._path(TRAJECTORY_FILE)
        rc = write_trajectory_csv(self._traj, path)
        self.assertEqual(rc.paths(), [path])
        with open(path, 'rb') as fh:
            text = fh.read()
        self.assertNotIn(b'\r', text)
        self.assertTrue(text.startswith(','.join(TRAJECTORY_COLUMNS).encode()))

        traj = read_trajectory_csv(path)
        self.assertEqual(traj.grid, self._traj.grid)
        numpy.testing.assert_array_equal(traj.states, self._traj.states)
        numpy.testing.assert_array_equal(traj.costates, self._traj.costates)
        numpy.testing.assert_array_equal(traj.phi, self._traj.phi)
        numpy.testing.assert_array_equal(traj.controls.uPValues(), self._traj.controls.uPValues())

    def testTrajectoryNeedsCostates(self):
        '''Test we only write trajectories with costates.'''
        sc = self._scenario
        traj = integrate_forward(sc.z0(), ControlSignal.constant(sc.grid(), ControlValue(1.0, 0.0)),
                                 sc.params, sc.weights, sc.grid())
        with self.assertRaises(ArgumentError):
            write_trajectory_csv(traj, self._path(TRAJECTORY_FILE))

    def testTrajectoryMissingColumns(self):
        '''Test reading a table that isn't a trajectory.'''
        path = self._path('bad.csv')
        with open(path, 'w') as fh:
            fh.write('t,x_S\n0,0.8\n1,0.7\n')
        with self.assertRaises(ArgumentError):
            read_trajectory_csv(path)

    def testControls(self):
        '''Test writing and reading back controls.'''
        path = self._path(CONTROLS_FILE)
        write_controls_csv(self._traj.controls, path)
        u = read_controls_csv(path)
        self.assertEqual(u.grid(), self._traj.grid)
        numpy.testing.assert_array_equal(u.uVValues(), self._traj.controls.uVValues())


    # ---------- JSON ----------

    def testJsonable(self):
        '''Test conversion of numpy and non-finite values.'''
        d = jsonable({'a': numpy.float64(1.5), 'b': numpy.int64(3), 'c': numpy.array([1.0, numpy.nan]),
                      'd': numpy.bool_(True), 'e': (1, 2), 'f': float('inf'), 1: complex(1.0, -2.0)})
        self.assertEqual(d, {'a': 1.5, 'b': 3, 'c': [1.0, None], 'd': True, 'e': [1, 2], 'f': None, '1': [1.0, -2.0]})
        json.dumps(d)

    def testReport(self):
        '''Test reports are written with sorted keys.'''
        path = self._path(REPORT_FILE)
        write_report_json({'z': 1, 'a': numpy.float64(2.0)}, path)
        with open(path) as fh:
            text = fh.read()
        self.assertLess(text.index('"a"'), text.index('"z"'))
        self.assertEqual(read_report_json(path), {'a': 2.0, 'z': 1})


    # ---------- Manifests ----------

    def testManifest(self):
        '''Test writing and reading back a manifest.'''
        path = self._path(MANIFEST_FILE)
        opts = SolveOptions(segments=20, sharpen=True)
        write_manifest(self._scenario, opts, ['solve', '--case', '2'], path, extra=dict(seed=1))
        m = read_manifest(path)
        self.assertEqual(m.scenario, self._scenario)
        self.assertEqual(m.options, opts)
        self.assertEqual(m.command, ['solve', '--case', '2'])
        self.assertEqual(m.extra, dict(seed=1))

    def testManifestNoOptions(self):
        '''Test a manifest for a run without a solve.'''
        path = self._path(MANIFEST_FILE)
        write_manifest(self._scenario, None, ['simulate'], path)
        self.assertIsNone(read_manifest(path).options)

    def testManifestVersion(self):
        '''Test we reject manifests of other versions.'''
        path = self._path(MANIFEST_FILE)
        with open(path, 'w') as fh:
            json.dump(dict(version=MANIFEST_VERSION + 1), fh)
        with self.assertRaises(ArgumentError):
            read_manifest(path)

    def testRunArtifacts(self):
        '''Test listing the files of a run.'''
        rc = RunArtifacts(trajectory_csv='t.csv', report_json='r.json', svgs=('a.svg', 'b.svg'))
        self.assertEqual(rc.paths(), ['t.csv', 'r.json', 'a.svg', 'b.svg'])


if __name__ == '__main__':
    unittest.main()
