#!/usr/bin/env python3
"""Smoke test for the lambda_transfer_py extension module.

Builds nothing itself: run `cargo build -p lambda-transfer-py` first, then
`python3 python/smoke_test.py`.  Locates the cdylib in target/debug (or
target/release) and exercises the main entry points against the bundled
19a1 / 817b1 fixtures.
"""

import importlib.util
import json
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load_module():
    names = ["liblambda_transfer_py.so", "lambda_transfer_py.so", "liblambda_transfer_py.dylib"]
    for profile in ("debug", "release"):
        for name in names:
            so = ROOT / "target" / profile / name
            if so.exists():
                spec = importlib.util.spec_from_file_location("lambda_transfer_py", so)
                mod = importlib.util.module_from_spec(spec)
                spec.loader.exec_module(mod)
                return mod
    sys.exit("extension not found; run `cargo build -p lambda-transfer-py` first")


def main():
    lt = load_module()

    assert lt.SCHEMA == "lambda-transfer/1"
    assert lt.class_number(-51) == 2
    assert lt.class_number(-163) == 1
    assert lt.kronecker(-51, 5) == 1
    assert lt.kronecker(-51, 43) == 1
    assert lt.sturm_bound(19 * 43, 2) == 146

    k = lt.QuadField(51)
    assert k.class_number == 2
    assert k.splitting_type(43) == "Split"
    assert k.norm_form_representation(43 * 43, 5) == (12, 11)
    brink = json.loads(k.brink(43, 5))
    assert brink["bstar"] == "-952105", brink
    assert brink["t"] == 1 and brink["s_ell"] == 1

    e1 = lt.Curve.load("19a1")
    assert e1.conductor() == 19
    assert e1.trace(43) == -1
    assert e1.tamagawa_product() == 1
    e2 = lt.Curve.load("817b1")
    assert e2.conductor() == 817
    assert e2.tamagawa_product() == 10
    assert json.loads(e2.local_data(43))["reduction"] == "split_multiplicative"

    lam = json.loads(e1.local_lambda(51, 43, 5))
    assert (lam["d_ell"], lam["s_ell"], lam["lambda_ell"]) == (1, 1, 1), lam

    assert lt.d_ell(-1, 43, "good", 5) == 1
    assert lt.d_ell(1, 19, "multiplicative", 5) == 0
    assert lt.transfer_lambda(0, [(19, 0, 0), (43, 1, 0)]) == 2

    rep = json.loads(lt.congruent("19a1", "817b1", 5))
    assert rep["verdict"] == "pass", rep["verdict"]

    dossier = json.loads(lt.transfer("19a1", "817b1", 5, 51))
    assert dossier["schema"] == "lambda-transfer/1"
    assert dossier["outcome"] == "success"
    assert dossier["transfer"]["lambda_f1"] == 0
    assert dossier["transfer"]["lambda_f2"] == 2

    print("smoke test: all assertions passed (lambda(817b1) = 2 over Q(sqrt(-51)) at p = 5)")


if __name__ == "__main__":
    main()
