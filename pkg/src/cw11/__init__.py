"""Convex C^{1,1} extension of finite 1-jets, with the accompanying side checks."""
from .balls import (CertificateError, MinimaxResult, PairBall, PairBalls, QueryCoincidesError,
                    TightCertificateWarning, gammas, membership_margin, pair_balls,
                    phi_diagnostic, phi_matrix, solve_minimax)
from .body import BodyData, BodyReport, check_body, check_kw11, check_outer
from .extension import (ExtensionError, ExtensionStep, ExtensionTrace, bracket, extend_many,
                        extend_point, minimal_convex_extension)
from .jet import (CwReport, InfeasibleJetError, Jet, JetEntry, JetError, cw11_gap,
                  legruyer_gamma, lip_gradient, minimal_cw11_constant, quadratic_growth_bound)

__version__ = "0.1.0"
