"""Exception hierarchy shared by every module of the package."""


class ColemanError(Exception):
    """Base class; the CLI maps subclasses to structured error lines."""

    module = "core"


class PrecisionError(ColemanError):
    """Raised when a computation has no p-adic digits left to report."""

    module = "padic-core"


class NonSimpleRootError(ColemanError):
    module = "padic-core"


class SeriesError(ColemanError):
    module = "padic-core"


class SingularModelError(ColemanError):
    module = "curve-model"


class NotIsomorphicError(ColemanError):
    module = "curve-model"


class BadReductionError(ColemanError):
    module = "frobenius-cohomology"


class SupersingularError(ColemanError):
    """The unit root subspace does not exist at a supersingular prime."""

    module = "frobenius-cohomology"


class WeierstrassDiscError(ColemanError):
    """Integration endpoint in a residue disc of a 2-torsion point."""

    module = "coleman-engine"


class DiscMismatchError(ColemanError):
    module = "coleman-engine"


class NoTorsionPointError(ColemanError):
    module = "coleman-engine"


class TorsionPointError(ColemanError):
    module = "heights-sigma"


class CatalogError(ColemanError):
    module = "cli-workbench"
