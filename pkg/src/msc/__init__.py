"""Exact symbolic calculus on multisymplectic phase spaces.

Modules:

* ``coeffring``   exact polynomials over the phase-space alphabet
* ``exterior``    graded forms / multivectors, wedge, hook, d, bases
* ``geometry``    bundle shape, connections, adapted frames, canonical forms
* ``vertcalc``    vertical exterior derivative and its homotopy potential
* ``hamiltonian`` Hamiltonian forms, multivector solver, bracket, bullet
* ``dynamics``    Legendre transform, field-equation residuals, splittings
* ``parser``/``cli``/``harness``  document format, command line, verification
"""

from .coeffring import ENERGY, Poly, base, field, jet, momentum
from .exterior import (ADAPTED, COORDINATE, GradedForm, MultiVector,
                       bidegree_split, change_basis, d, hook, wedge)
from .geometry import (BundleShape, ConnectionData, SetupDescriptor,
                       build_frame, build_gamma_bar, canonical_forms,
                       volume_form)
from .hamiltonian import (HamiltonianForm, NotHamiltonian, bullet, from_array,
                          ham_blade, hodge_star, is_hamiltonian,
                          poisson_bracket, solve_hmvf)
from .vertcalc import NotClosed, NotExact, dv, dv_potential, vertical_lie
from .dynamics import (DWHamiltonian, DegenerateLagrangian, Lagrangian,
                       MissingMomenta, Section, covariant_hamilton_residual,
                       el_residual, gamma_split_hamiltonian,
                       hamilton_residual, legendre, psi_star_transform,
                       psi_transform)
from .parser import SessionDocument, parse_document, render_document

__version__ = "0.1.0"
