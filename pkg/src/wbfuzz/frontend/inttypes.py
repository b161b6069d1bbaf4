"""Integer types of the MiniC subset and C's conversion rules over them."""
from __future__ import annotations

from dataclasses import dataclass

BOOL_KIND = "bool"
SIGNED = "signed"
UNSIGNED = "unsigned"


@dataclass(frozen=True)
class TypeDesc:
    kind: str
    width: int

    def __post_init__(self) -> None:
        if self.kind == BOOL_KIND:
            if self.width != 1:
                raise ValueError("bool must have width 1")
        elif self.kind in (SIGNED, UNSIGNED):
            if self.width not in (8, 16, 32, 64):
                raise ValueError(f"bad integer width {self.width}")
        else:
            raise ValueError(f"bad type kind {self.kind!r}")

    @property
    def signed(self) -> bool:
        return self.kind == SIGNED

    @property
    def is_bool(self) -> bool:
        return self.kind == BOOL_KIND

    @property
    def mask(self) -> int:
        return (1 << self.width) - 1

    @property
    def min(self) -> int:
        return -(1 << (self.width - 1)) if self.signed else 0

    @property
    def max(self) -> int:
        return (1 << (self.width - 1)) - 1 if self.signed else self.mask

    def wrap(self, value: int) -> int:
        """Modular truncation of ``value`` into this type's range."""
        value &= self.mask
        if self.signed and value >> (self.width - 1):
            value -= 1 << self.width
        return value

    def convert(self, value: int) -> int:
        # C conversion: anything nonzero becomes 1 for _Bool
        if self.is_bool:
            return 1 if value else 0
        return self.wrap(value)

    def contains(self, value: int) -> bool:
        return self.min <= value <= self.max

    def __str__(self) -> str:
        if self.is_bool:
            return "_Bool"
        base = {8: "char", 16: "short", 32: "int", 64: "long long"}[self.width]
        if self.signed:
            return "signed char" if self.width == 8 else base
        return f"unsigned {base}"


BOOL = TypeDesc(BOOL_KIND, 1)
CHAR = TypeDesc(SIGNED, 8)
UCHAR = TypeDesc(UNSIGNED, 8)
SHORT = TypeDesc(SIGNED, 16)
USHORT = TypeDesc(UNSIGNED, 16)
INT = TypeDesc(SIGNED, 32)
UINT = TypeDesc(UNSIGNED, 32)
LONGLONG = TypeDesc(SIGNED, 64)
ULONGLONG = TypeDesc(UNSIGNED, 64)


def long_type(arch: int) -> TypeDesc:
    return INT if arch == 32 else LONGLONG


def ulong_type(arch: int) -> TypeDesc:
    return UINT if arch == 32 else ULONGLONG


def nondet_types(arch: int) -> dict[str, TypeDesc]:
    """Suffix of ``__VERIFIER_nondet_<T>`` mapped to the returned type."""
    return {
        "bool": BOOL,
        "char": CHAR,
        "uchar": UCHAR,
        "short": SHORT,
        "ushort": USHORT,
        "int": INT,
        "uint": UINT,
        "unsigned": UINT,
        "long": long_type(arch),
        "ulong": ulong_type(arch),
        "longlong": LONGLONG,
        "ulonglong": ULONGLONG,
    }


def promote(t: TypeDesc) -> TypeDesc:
    """Integer promotion: anything narrower than int becomes int."""
    if t.width < 32:
        return INT
    return t


def common_type(a: TypeDesc, b: TypeDesc) -> TypeDesc:
    """Usual arithmetic conversions on two (unpromoted) operand types."""
    a, b = promote(a), promote(b)
    if a == b:
        return a
    if a.signed == b.signed:
        return a if a.width >= b.width else b
    signed, unsigned = (a, b) if a.signed else (b, a)
    if unsigned.width >= signed.width:
        return unsigned
    return signed
