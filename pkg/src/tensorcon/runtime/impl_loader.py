"""tensorcon.runtime.impl_loader -- Discover and load .impl.py files."""

from __future__ import annotations

import logging
import sys
import types
from pathlib import Path

logger = logging.getLogger(__name__)

IMPL_SUFFIX = ".impl.py"


class ImplLoader:
    """Discovers and loads ``.impl.py`` implementation files.

    Implementation files contain ``@tensorcon.impl`` registrations that
    provide concrete implementations for stub methods declared in the
    regular ``.py`` modules. They are not importable by name (the extra dot
    in the file name), so they are compiled and executed into fresh module
    objects registered in ``sys.modules``.

    Attributes:
        loaded: Dotted names of the modules loaded by this loader, in load order.
    """

    def __init__(self) -> None:
        self.loaded: list[str] = []

    def discover(self, package_path: str | Path) -> list[Path]:
        """Scan a directory tree for ``.impl.py`` files.

        Args:
            package_path: Root directory to scan.

        Returns:
            Sorted list of paths; empty when the directory does not exist.
        """
        root = Path(package_path)
        if not root.is_dir():
            return []
        return sorted(root.rglob("*" + IMPL_SUFFIX))

    def load_file(
        self,
        impl_path: str | Path,
        package_root: str | Path,
        base_package: str,
    ) -> types.ModuleType:
        """Load one ``.impl.py`` file, executing its registrations.

        Args:
            impl_path: Path to the ``.impl.py`` file.
            package_root: Directory the dotted name is computed from.
            base_package: Dotted prefix, e.g. ``"tensorcon.builtins"``.

        Returns:
            The executed module object.
        """
        impl_path = Path(impl_path)
        module_name = module_name_for(impl_path, Path(package_root), base_package)
        source = impl_path.read_text(encoding="utf-8")
        module = _exec_module(module_name, source, str(impl_path))
        self.loaded.append(module_name)
        logger.debug("loaded %s from %s", module_name, impl_path)
        return module

    def load_all(
        self,
        package_path: str | Path,
        base_package: str,
    ) -> list[types.ModuleType]:
        """Discover and load every ``.impl.py`` file under a package directory."""
        package_path = Path(package_path)
        return [
            self.load_file(path, package_path, base_package)
            for path in self.discover(package_path)
        ]


def module_name_for(impl_path: Path, package_root: Path, base_package: str) -> str:
    """Convert an implementation file path to a dotted module name.

    ``root/sub/foo.impl.py`` with ``base_package="pkg"`` becomes ``"pkg.sub.foo"``.
    """
    rel = impl_path.relative_to(package_root)
    stem = rel.name[: -len(IMPL_SUFFIX)] if rel.name.endswith(IMPL_SUFFIX) else rel.stem
    parts = [*rel.parent.parts, stem]
    if base_package:
        parts.insert(0, base_package)
    return ".".join(parts)


def _exec_module(module_name: str, source: str, filename: str) -> types.ModuleType:
    module = types.ModuleType(module_name)
    module.__file__ = filename
    module.__package__ = module_name.rpartition(".")[0] or module_name
    sys.modules[module_name] = module
    try:
        exec(compile(source, filename, "exec"), module.__dict__)
    except BaseException:
        sys.modules.pop(module_name, None)
        raise
    return module
