"""Finite approximate actions (sofic witnesses) for monoids.

Finite monoids are handled from their Cayley tables; infinite ones through the
structured families in ``sofic.structured``.
"""
from ._backend import BACKEND
from .builder import (bicyclic_defect_probe, build_witness, check_hypotheses, choose_delta,
                      compute_pq_decomposition)
from .errors import (CapExceeded, HypothesesNotMet, MalformedFile, NotAssociative, RefusalError,
                     SearchBudgetExceeded, SoficError)
from .fixtures import load_fixture
from .green import (circle_action, eggbox_summary, green_relations, green_relations_definitional,
                    j_class_of_identity_is_units, schutzenberger_group)
from .groups import (AbelianGroup, FiniteGroup, FreeGroup, find_folner, folner_quality,
                     joint_quotient_image, sofic_group_action)
from .monoids import (FiniteMonoid, cancellativity_check, direct_product, make_cyclic_group_monoid,
                      make_finite_monoid, make_semilattice, make_transformation_monoid,
                      word_product)
from .structured import make_bicyclic, make_coset_monoid, make_free_times_semilattice
from .witness import (ActionWitness, DefectReport, check_witness, diagonal_power_witness, passes,
                      read_witness, write_witness)

__version__ = "0.1.0"
