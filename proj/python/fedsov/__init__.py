"""Federated model ownership verification: hash watermarks bound to
pairing-based short signatures, with an exact security-boundary calculator."""

try:
    from ._core import *  # noqa: F401,F403
    from ._core import (
        BoundaryResult,
        RoundMetrics,
        SignatureScheme,
        attacker_bound_log2,
        convergence_curve,
        cumulative_ball_size_log2,
        embed_hex,
        extract_hex,
        generate_watermark_hex,
        hamming_distance_hex,
        run_federation,
        shake256,
        solve_boundary,
    )
except ImportError:  # in-tree build: the extension sits directly on sys.path
    from _core import *  # noqa: F401,F403
    from _core import (
        BoundaryResult,
        RoundMetrics,
        SignatureScheme,
        attacker_bound_log2,
        convergence_curve,
        cumulative_ball_size_log2,
        embed_hex,
        extract_hex,
        generate_watermark_hex,
        hamming_distance_hex,
        run_federation,
        shake256,
        solve_boundary,
    )

__all__ = [
    "BoundaryResult",
    "RoundMetrics",
    "SignatureScheme",
    "attacker_bound_log2",
    "convergence_curve",
    "cumulative_ball_size_log2",
    "embed_hex",
    "extract_hex",
    "generate_watermark_hex",
    "hamming_distance_hex",
    "run_federation",
    "shake256",
    "solve_boundary",
]
