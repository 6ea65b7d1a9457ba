#!/usr/bin/env python3
# Copyright 2026 The FairRank Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes headered CSV copies of the Adult, COMPAS and German credit datasets.

The raw files are the canonical UCI / ProPublica releases. They are taken from
a directory laid out as <src>/adult/adult.{data,test},
<src>/compas/compas-scores-two-years.csv and <src>/german/german.data. When no
directory is given, the copies bundled in the `responsibly` wheel are fetched
with pip.

No filtering happens here; row filters, missing-value handling and feature
encoding are declared in data/schemas/*.schema and applied by the C++ loader.
"""

import argparse
import csv
import pathlib
import subprocess
import sys
import tempfile
import zipfile

ADULT_COLUMNS = [
    "age", "workclass", "fnlwgt", "education", "education_num",
    "marital_status", "occupation", "relationship", "race", "sex",
    "capital_gain", "capital_loss", "hours_per_week", "native_country",
    "income",
]

GERMAN_COLUMNS = [
    "checking_status", "duration", "credit_history", "purpose",
    "credit_amount", "savings_status", "employment", "installment_commitment",
    "personal_status", "other_parties", "residence_since",
    "property_magnitude", "age", "other_payment_plans", "housing",
    "existing_credits", "job", "num_dependents", "own_telephone",
    "foreign_worker", "credit",
]

# personal_status codes: A91 male divorced/separated, A92 female
# divorced/separated/married, A93 male single, A94 male married/widowed,
# A95 female single.
GERMAN_FEMALE = {"A92", "A95"}
GERMAN_SINGLE = {"A93", "A95"}


def fetch_responsibly(workdir: pathlib.Path) -> pathlib.Path:
    subprocess.run(
        [sys.executable, "-m", "pip", "download", "responsibly==0.1.2",
         "--no-deps", "-d", str(workdir)],
        check=True)
    wheel = next(workdir.glob("responsibly-*.whl"))
    with zipfile.ZipFile(wheel) as zf:
        zf.extractall(workdir / "x")
    return workdir / "x" / "responsibly" / "dataset"


def write_adult(src: pathlib.Path, out: pathlib.Path) -> int:
    rows = []
    for name in ("adult.data", "adult.test"):
        with open(src / "adult" / name) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("|"):
                    continue
                fields = [f.strip() for f in line.split(",")]
                if len(fields) != len(ADULT_COLUMNS):
                    continue
                fields[-1] = fields[-1].rstrip(".")
                rows.append(fields)
    with open(out / "adult.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ADULT_COLUMNS)
        writer.writerows(rows)
    return len(rows)


def write_compas(src: pathlib.Path, out: pathlib.Path) -> int:
    text = (src / "compas" / "compas-scores-two-years.csv").read_text()
    (out / "compas.csv").write_text(text)
    return text.count("\n") - 1


def write_german(src: pathlib.Path, out: pathlib.Path) -> int:
    count = 0
    with open(src / "german" / "german.data") as fh, \
            open(out / "german.csv", "w", newline="") as dst:
        writer = csv.writer(dst, lineterminator="\n")
        writer.writerow(GERMAN_COLUMNS + ["sex", "marital_single"])
        for line in fh:
            fields = line.split()
            if len(fields) != len(GERMAN_COLUMNS):
                continue
            status = fields[GERMAN_COLUMNS.index("personal_status")]
            sex = "female" if status in GERMAN_FEMALE else "male"
            single = "1" if status in GERMAN_SINGLE else "0"
            writer.writerow(fields + [sex, single])
            count += 1
    return count


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--source", type=pathlib.Path,
                        help="directory holding the raw dataset files")
    parser.add_argument("--out", type=pathlib.Path,
                        default=pathlib.Path(__file__).resolve().parent.parent
                        / "data")
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    with tempfile.TemporaryDirectory() as tmp:
        src = args.source or fetch_responsibly(pathlib.Path(tmp))
        print("adult.csv:", write_adult(src, args.out), "rows")
        print("compas.csv:", write_compas(src, args.out), "rows")
        print("german.csv:", write_german(src, args.out), "rows")
    return 0


if __name__ == "__main__":
    sys.exit(main())
