"""Filters available to webhook body templates (registered as builtins)."""
import json
from typing import Any, Optional, Union

import numpy as np
from django import template
from django.core.serializers.json import DjangoJSONEncoder
from django.utils.safestring import mark_safe

register = template.Library()


class EventJSONEncoder(DjangoJSONEncoder):
    """DjangoJSONEncoder that also accepts numpy scalars and arrays from run summaries."""

    def default(self, o: Any) -> Any:
        if isinstance(o, np.generic):
            return o.item()
        if isinstance(o, np.ndarray):
            return o.tolist()
        return super().default(o)


@register.filter(name="json_dump", is_safe=True)
def json_dump(value: Any, indent: Optional[Union[int, str]] = None) -> str:
    """Event details as unescaped JSON: ``{{ details|json_dump }}`` or ``{{ details|json_dump:2 }}``.

    None renders as an empty string.
    """
    if value is None:
        return ""
    try:
        indent_int = int(indent) if indent is not None else None
        return mark_safe(json.dumps(value, indent=indent_int, ensure_ascii=False, cls=EventJSONEncoder))
    except (TypeError, ValueError):
        return "Cannot serialize object to JSON"
