"""Price/size efficiency comparison of GPUs against dedicated satellite heaters.

Ships a small built-in catalog of representative products; users can
load their own since prices drift. For equal heat output, consumer GPUs
undercut polyimide heaters on dollars per watt by roughly an order of
magnitude, while heaters win on raw volume per watt — an advantage that
shrinks once the spacing needed for heat flow between stacked foil
heaters is priced in.
"""

import csv
import io
import math
from dataclasses import dataclass
from enum import Enum

from .errors import CatalogError, ConfigurationError


class ProductKind(Enum):
    GPU = "gpu"
    HEATER = "heater"


@dataclass(frozen=True)
class ProductSpec:
    """One catalog row."""

    name: str
    kind: ProductKind
    price_usd: float
    power_w: float
    size_cm3: float

    def __post_init__(self):
        problems = []
        for field_name in ("price_usd", "power_w", "size_cm3"):
            if not getattr(self, field_name) > 0:
                problems.append(
                    f"product {self.name}: {field_name} must be > 0, "
                    f"got {getattr(self, field_name)}"
                )
        if problems:
            raise ConfigurationError(problems)


BUILTIN_CATALOG = (
    ProductSpec("MSI GTX 980 GAMING 4G", ProductKind.GPU, 389.0, 165.0, 1406.16),
    ProductSpec("MSI GTX 950 GAMING 2G", ProductKind.GPU, 299.0, 90.0, 1368.63),
    ProductSpec("maxsun RX 550 4GB", ProductKind.GPU, 84.0, 35.0, 731.675),
    ProductSpec("ASRock Intel ARC A380 6GB", ProductKind.GPU, 110.0, 75.0, 1062.936),
    ProductSpec("Omega Polyimide Heater Kit", ProductKind.HEATER, 62.89, 5.0, 0.164),
    ProductSpec("Minco Polyimide Thermofoil", ProductKind.HEATER, 106.0, 7.5, 0.098),
)


def price_efficiency(product: ProductSpec) -> float:
    """Dollars per watt of heat output. Lower is better."""
    return product.price_usd / product.power_w


def size_efficiency(product: ProductSpec) -> float:
    """Cubic centimetres per watt of heat output. Lower is better."""
    return product.size_cm3 / product.power_w


_METRICS = {"price": price_efficiency, "size": size_efficiency}


def best_by(catalog, metric: str, kind: ProductKind) -> ProductSpec:
    """Product of the given kind minimizing $/W or cm³/W; ties by name."""
    try:
        fn = _METRICS[metric]
    except KeyError:
        raise ValueError(f"metric must be one of {sorted(_METRICS)}, got {metric!r}") from None
    subset = [p for p in catalog if p.kind is kind]
    if not subset:
        raise CatalogError(f"catalog has no products of kind {kind.value!r}")
    return min(subset, key=lambda p: (fn(p), p.name))


def cost_ratio(gpu_best: ProductSpec, heater_best: ProductSpec) -> float:
    """Price-efficiency quotient of best GPU over best heater (< 1 means
    the GPU heats more cheaply)."""
    return price_efficiency(gpu_best) / price_efficiency(heater_best)


def stacked_heater_volume(product: ProductSpec, count: int, gap_factor: float) -> float:
    """Effective volume of `count` stacked foil heaters.

    Foil heaters are thin but cannot be stuck flush together: heat has
    to flow out between them, so the effective stacked volume exceeds
    count * size by a user-supplied gap factor (>= 1; no vendor
    quantifies it).
    """
    if product.kind is not ProductKind.HEATER:
        raise ValueError(f"stacking applies to heaters, not {product.kind.value!r}")
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if gap_factor < 1.0:
        raise ValueError(f"gap_factor must be >= 1, got {gap_factor}")
    return count * product.size_cm3 * gap_factor


def round_significant(value: float, digits: int) -> float:
    if value == 0:
        return 0.0
    return round(value, digits - 1 - math.floor(math.log10(abs(value))))


def format_price_efficiency(value: float) -> str:
    """Display form: two decimals, e.g. 1.47 $/W."""
    return f"{value:.2f}"


def format_size_efficiency(value: float) -> str:
    """Display form: two significant figures, e.g. 8.5 or 0.013 cm³/W."""
    return f"{round_significant(value, 2):g}"


_CSV_FIELDS = ("name", "kind", "price_usd", "power_w", "size_cm3")


def save_catalog(catalog, path):
    with open(path, "w", newline="") as fh:
        _write_catalog(catalog, fh)


def _write_catalog(catalog, fh):
    writer = csv.writer(fh)
    writer.writerow(_CSV_FIELDS)
    for p in catalog:
        # repr round-trips floats bit-exactly
        writer.writerow([p.name, p.kind.value, repr(p.price_usd), repr(p.power_w),
                         repr(p.size_cm3)])


def load_catalog(path) -> tuple:
    with open(path, newline="") as fh:
        return _read_catalog(fh)


def _read_catalog(fh) -> tuple:
    reader = csv.reader(fh)
    header = next(reader, None)
    if header != list(_CSV_FIELDS):
        raise ConfigurationError(
            f"catalog header must be {','.join(_CSV_FIELDS)}, got "
            f"{','.join(header) if header else 'an empty file'}"
        )
    products = []
    for row in reader:
        if not row:
            continue
        if len(row) != len(_CSV_FIELDS):
            raise ConfigurationError(f"catalog row has {len(row)} fields: {row}")
        name, kind, price, power, size = row
        try:
            product_kind = ProductKind(kind)
        except ValueError:
            raise ConfigurationError(
                f"product {name}: kind must be gpu or heater, got {kind!r}"
            ) from None
        products.append(
            ProductSpec(name, product_kind, float(price), float(power), float(size))
        )
    if not products:
        raise ConfigurationError("catalog contains no products")
    return tuple(products)


def catalog_to_csv(catalog) -> str:
    buf = io.StringIO()
    _write_catalog(catalog, buf)
    return buf.getvalue()


def catalog_from_csv(text: str) -> tuple:
    return _read_catalog(io.StringIO(text))
