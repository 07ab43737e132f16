#!/usr/bin/env python3
"""Write a directory of ready-to-use form files for the CLI.

Emits standard forms over several coefficient groups, one singular mutant
(lambda scaled to 2), and an input file for each non-trivial CLI command.

Usage:
    python3 scripts/emit_example_forms.py [outdir]
"""

import json
import pathlib
import sys

from wallforms import schema
from wallforms.forms import (
    duality_hmap,
    standard_form,
    standard_inclusion,
    trivial_parameter,
    z2_parameter,
)
from wallforms.intlinalg import FgAbGroup, IntMatrix, trivial_group


def lambda_two_mutant_doc():
    p = z2_parameter()
    w1 = standard_form(1, p)
    doc = schema.form_to_json(w1)
    b = w1.layout.b_index(0)
    doc["form"]["lambda"][0][b] = 2
    # axiom ii then forces mu(tau(a,h), b) = 2h = 0
    doc["form"]["mu"][w1.layout.t_index(0, 0)][b] = [0]
    doc["form"]["mu"][b][w1.layout.t_index(0, 0)] = [0]
    return doc


def main(argv=None):
    out = pathlib.Path(argv[0] if argv else "examples_out")
    out.mkdir(parents=True, exist_ok=True)

    def write(name, doc):
        (out / name).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
        print("wrote", out / name)

    write("w2_z2.json", schema.form_to_json(standard_form(2, z2_parameter())))
    write("w3_h0.json", schema.form_to_json(
        standard_form(3, trivial_parameter(trivial_group))))
    write("w4_h0.json", schema.form_to_json(
        standard_form(4, trivial_parameter(trivial_group))))
    write("w2_z2z4.json", schema.form_to_json(
        standard_form(2, trivial_parameter(FgAbGroup((2, 4))))))
    write("w1_lambda2_mutant.json", lambda_two_mutant_doc())

    w2 = standard_form(2, z2_parameter())
    doc = schema.form_to_json(w2)
    doc["morphism"] = schema.morphism_to_json(standard_inclusion(1, w2))
    write("complement_input.json", doc)

    doc = schema.form_to_json(w2)
    doc["f1"] = schema.morphism_to_json(standard_inclusion(1, w2, blocks=(1,)))
    doc["f2"] = schema.morphism_to_json(standard_inclusion(1, w2))
    write("transitivity_input.json", doc)

    w3 = standard_form(3, z2_parameter())
    phi = duality_hmap(w3, 1, w3.plus_gens()[w3.layout.b_index(0)])
    doc = schema.form_to_json(w3)
    doc["hom"] = {"nu": 1,
                  "f_minus": schema.matrix_to_json(phi.f_minus.matrix),
                  "f_plus": schema.matrix_to_json(phi.f_plus.matrix)}
    write("kernel_witness_input.json", doc)
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
