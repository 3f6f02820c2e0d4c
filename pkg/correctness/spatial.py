"""Uniform spatial hash for Chebyshev-distance neighbourhoods in the plane."""
import itertools

import numpy as np


class SpatialHash:
    """
    Buckets 2-D points into square cells of side `cell`. Every point within
    Chebyshev distance `cell` of a query lies in the query's bucket or one of
    its eight neighbours. cell = 0 degenerates to exact coordinate matching.
    """

    def __init__(self, points, cell):
        self.points = np.asarray(points, dtype=float).reshape(-1, 2)
        self.cell = float(cell)
        self.buckets = {}
        for index, key in enumerate(self.keys(self.points)):
            self.buckets.setdefault(key, []).append(index)
        self.buckets = {key: np.array(members, dtype=np.int64) for key, members in self.buckets.items()}

    def keys(self, points):
        if self.cell > 0:
            spaces = np.floor(points / self.cell).astype(np.int64)
            return [tuple(s) for s in spaces.tolist()]
        return [tuple(p) for p in points.tolist()]

    def neighbourhood(self, key):
        if self.cell <= 0:
            yield key
            return
        for di, dj in itertools.product((-1, 0, 1), repeat=2):
            yield key[0] + di, key[1] + dj

    def candidates(self, key):
        found = [self.buckets[k] for k in self.neighbourhood(key) if k in self.buckets]
        return np.concatenate(found) if found else np.empty(0, dtype=np.int64)

    def within(self, queries, theta):
        """
        Yield (query indices, neighbour matrix, candidate indices) per query
        bucket; matrix[i, j] is True when candidate j lies within theta of query i.
        """
        queries = np.asarray(queries, dtype=float).reshape(-1, 2)
        groups = {}
        for index, key in enumerate(self.keys(queries)):
            groups.setdefault(key, []).append(index)
        for key, members in groups.items():
            members = np.array(members, dtype=np.int64)
            found = self.candidates(key)
            if not len(found):
                yield members, np.zeros((len(members), 0), dtype=bool), found
                continue
            gap = np.abs(queries[members, None, :] - self.points[None, found, :]).max(axis=2)
            yield members, gap <= theta, found
