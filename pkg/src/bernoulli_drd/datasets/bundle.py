"""Instance plus benchmark ground truths, serialized as one JSON document."""

import json
from dataclasses import dataclass, field

import numpy as np

from ..model import instance_from_dict, validate_ground_truth
from ..runner import any_region_valid


@dataclass(eq=False)
class DatasetBundle:
    instance: object
    ground_truths: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        gt = np.asarray(self.ground_truths, dtype=np.int8)
        self.ground_truths = gt.reshape(-1, self.instance.num_tests)
        for x in self.ground_truths:
            validate_ground_truth(self.instance, x)

    @property
    def num_problems(self):
        return self.ground_truths.shape[0]

    def check_conditioning(self):
        """True when every ground truth validates at least one region."""
        return bool(np.all(any_region_valid(self.instance, self.ground_truths)))

    def to_dict(self):
        d = self.instance.to_dict()
        d["ground_truths"] = ["".join(str(int(v)) for v in row) for row in self.ground_truths]
        d["provenance"] = self.provenance
        return d


def bundle_from_dict(d):
    inst = instance_from_dict(d)
    rows = [[int(c) for c in row] for row in d.get("ground_truths", [])]
    gt = np.array(rows, dtype=np.int8).reshape(len(rows), inst.num_tests)
    return DatasetBundle(inst, gt, dict(d.get("provenance", {})))


def dumps_bundle(bundle):
    return json.dumps(bundle.to_dict(), indent=1, sort_keys=True) + "\n"


def save_bundle(bundle, path):
    with open(path, "w") as fh:
        fh.write(dumps_bundle(bundle))


def load_bundle(path):
    with open(path) as fh:
        return bundle_from_dict(json.load(fh))
