from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Dict, Literal, Optional, Sequence, Union

if TYPE_CHECKING:  # pragma: no cover
    from .laurent import LaurentNum

# an element of 𝒪: a LaurentNum, or its π-digits from π^0 upward
Scalar = Union["LaurentNum", Sequence[int]]

# where a trace or norm lands: the base K, the unramified H, or a lower tower level
Target = Union[Literal["K", "H"], int]


@dataclass
class ResponseEnvelope:
    """{"ok": true, "result": ...} or {"ok": false, "error": {code, message, details}}."""

    ok: bool
    result: Optional[Dict[str, Any]] = None
    error: Optional[Dict[str, Any]] = None

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {"ok": self.ok}
        if self.result is not None:
            payload["result"] = self.result
        if self.error is not None:
            payload["error"] = self.error
        return payload
