"""Integer formal sums over an arbitrary labeled basis.

Used for conjugacy classes, twisted classes, connected components, set
elements, and group elements.  Zero coefficients are never stored and the
term order is canonical (sorted by rendered label), so equality is
structural.
"""

from __future__ import annotations

from dataclasses import dataclass


def _label_key(label):
    return str(label)


@dataclass(frozen=True)
class FormalSum:
    """Finite integer linear combination of basis labels."""

    terms: tuple  # ((label, coeff), ...) with nonzero coeffs, sorted by str(label)

    @staticmethod
    def from_pairs(pairs) -> "FormalSum":
        acc = {}
        for label, coeff in pairs:
            acc[label] = acc.get(label, 0) + int(coeff)
        kept = [(label, c) for label, c in acc.items() if c != 0]
        kept.sort(key=lambda lc: _label_key(lc[0]))
        return FormalSum(tuple(kept))

    @staticmethod
    def zero() -> "FormalSum":
        return FormalSum(())

    @staticmethod
    def single(label, coeff: int = 1) -> "FormalSum":
        return FormalSum.from_pairs([(label, coeff)])

    def coefficient(self, label) -> int:
        for lab, c in self.terms:
            if lab == label:
                return c
        return 0

    def labels(self) -> tuple:
        return tuple(lab for lab, _ in self.terms)

    def augment(self) -> int:
        """Sum of all coefficients."""
        return sum(c for _, c in self.terms)

    def __add__(self, other: "FormalSum") -> "FormalSum":
        return FormalSum.from_pairs(list(self.terms) + list(other.terms))

    def __neg__(self) -> "FormalSum":
        return FormalSum(tuple((lab, -c) for lab, c in self.terms))

    def __sub__(self, other: "FormalSum") -> "FormalSum":
        return self + (-other)

    def scale(self, c: int) -> "FormalSum":
        if c == 0:
            return FormalSum.zero()
        return FormalSum(tuple((lab, c * k) for lab, k in self.terms))

    def map_labels(self, fn) -> "FormalSum":
        """Push the sum forward along a label map, merging collisions."""
        return FormalSum.from_pairs((fn(lab), c) for lab, c in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def to_dict(self) -> dict:
        """Render as {str(label): coeff} with deterministic key order."""
        return {str(lab): c for lab, c in self.terms}

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for lab, c in self.terms:
            if c == 1:
                parts.append(f"+[{lab}]")
            elif c == -1:
                parts.append(f"-[{lab}]")
            else:
                parts.append(f"{c:+d}*[{lab}]")
        return " ".join(parts)
