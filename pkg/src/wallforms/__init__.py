"""Exact computation with Wall forms.

Modules:
  intlinalg   exact integer matrices, Smith normal form, f.g. abelian groups
  hpairs      the category of H-pairs, probes, Hom groups into probes
  forms       Wall forms: axioms, duality, complements, rank certificates
  lemmas      constructive structure lemmas on standard forms
  complexes   orthogonality complexes and integral homology evidence
  schema      JSON encoding for every exchanged value
  cli         the ``wallform`` batch front end
"""

from .intlinalg import (
    FgAbGroup,
    GroupElement,
    GroupHom,
    IntMatrix,
    cyclic,
    free_group,
    generating_set_length,
    group_from_presentation,
    kernel_basis,
    smith_normal_form,
    tensor_product,
    trivial_group,
)
from .hpairs import (
    HMap,
    HPair,
    SubHPair,
    hmap_kernel,
    hom_to_probe,
    hpair_direct_sum,
    make_hpair,
    probe,
    sub_hpair,
)
from .forms import (
    FormParameter,
    RankBudget,
    SubWallForm,
    WallForm,
    WallMorphism,
    duality_map,
    eval_alpha_plus,
    is_nonsingular,
    make_morphism,
    make_wall_form,
    orthogonal_complement,
    perp_sum,
    rank_certificate,
    sample_axioms,
    stable_rank_certificate,
    standard_form,
    standard_inclusion,
    sub_wall_form,
    trivial_parameter,
    z2_parameter,
)
from .lemmas import (
    cancel_standard,
    complement_standardize,
    envelope_morphism,
    focus_automorphism,
    isotropic_split,
    kernel_rank_witness,
    slice_rank_witness,
    transitivity_witness,
)
from .complexes import (
    CliqueComplex,
    HomologyReport,
    build_complex,
    connectivity_report,
    enumerate_vertices,
    homology,
    lcm_report,
    link,
)

__version__ = "0.1.0"
