import logging
from pathlib import Path
from typing import Any, Dict, Optional

from fastmcp import FastMCP
from starlette.requests import Request
from starlette.responses import JSONResponse

from itembound.bounds import bound_with_policy, parse_policy
from itembound.config import Settings, configure_logging
from itembound.core import FrequencyAssignment, read_family
from itembound.cut import restricted_safe_set
from itembound.errors import ItemboundError
from itembound.graph import minimal_safe_set
from itembound.query import format_formula, parse

# Load settings (and .env) and configure logging
settings = Settings.from_env()
configure_logging(settings)
logger = logging.getLogger(__name__)

mcp = FastMCP(
    name="Itemset Frequency Bounds",
    on_duplicate_tools="error",
)


def _resolve_family(name: str) -> Path:
    """Resolve a family file name inside the data directory."""
    data_dir = Path(settings.data_dir).resolve()
    candidates = [data_dir / name, data_dir / f"{name}.family"]
    for path in candidates:
        path = path.resolve()
        if data_dir not in path.parents:
            raise ValueError(f"family '{name}' is outside the data directory")
        if path.is_file():
            return path
    raise FileNotFoundError(f"no family file '{name}' in {data_dir}")


def _load_family(name: str) -> FrequencyAssignment:
    return read_family(_resolve_family(name))


def _error_record(kind: str, error: Exception) -> Dict[str, Any]:
    return {"error": kind, "message": str(error)}


def get_frequency_bound(
    family: str,
    query: str,
    policy: str = "safe",
) -> dict:
    """
    Compute the exact range of frequencies a boolean query can have, given the
    itemset frequencies stored in a family file.

    Args:
        family: family file name inside the data directory (e.g. "example1")
        query: boolean query over attribute names, e.g. "b & c" or "a | !b"
        policy: projection policy: trivial, safe, restricted:M or factorized

    Returns:
        interval ends (as exact fractions), the projection set, the number of
        LP variables and policy metadata; or an error record
    """
    try:
        logger.info(f"Bounding '{query}' on family '{family}' ({policy})")
        theta = _load_family(family)
        f = parse(query)
        report = bound_with_policy(f, theta, parse_policy(policy))
        return {
            "query": format_formula(f),
            "policy": str(report.policy),
            "lo": str(report.interval.lo),
            "hi": str(report.interval.hi),
            "projection": list(theta.universe.names_of(report.projection)),
            "variables": report.variables,
            "metadata": {k: v if isinstance(v, (bool, int, str)) else str(v)
                         for k, v in report.metadata.items()},
        }
    except (ItemboundError, OSError, ValueError, KeyError) as e:
        logger.error(f"Error bounding query: {e}")
        return _error_record(type(e).__name__, e)


def get_safe_set(
    family: str,
    attrs: str,
    max_size: Optional[int] = None,
) -> dict:
    """
    Find the smallest set of attributes containing the given ones on which the
    frequency bounds of any query are exact (a safe set). With max_size, find a
    restricted safe set of at most that many attributes by cutting weak
    dependencies.

    Args:
        family: family file name inside the data directory
        attrs: comma-separated attribute names, e.g. "b,c"
        max_size: optional size budget

    Returns:
        the safe set and, for restricted sets, the removed dependencies
    """
    try:
        theta = _load_family(family)
        universe = theta.universe
        base = universe.itemset(a.strip() for a in attrs.split(",") if a.strip())
        if max_size is None:
            safe = minimal_safe_set(base, theta.family)
            return {"safe_set": list(universe.names_of(safe))}
        result = restricted_safe_set(base, theta, max_size)
        return {
            "safe_set": list(universe.names_of(result.itemset)),
            "removed_edges": [[universe.names[u], universe.names[v]]
                              for u, v in result.removed_edges],
            "within_budget": result.within_budget,
            "exact": result.exact,
        }
    except (ItemboundError, OSError, ValueError, KeyError) as e:
        logger.error(f"Error finding safe set: {e}")
        return _error_record(type(e).__name__, e)


mcp.tool(name="get_frequency_bound", tags={"bounds"})(get_frequency_bound)
mcp.tool(name="get_safe_set", tags={"bounds"})(get_safe_set)


@mcp.custom_route("/health", methods=["GET"])
def health_check(request: Request) -> JSONResponse:
    return JSONResponse({"status": "ok"})


@mcp.custom_route("/api/info", methods=["GET"])
def server_info(request: Request) -> JSONResponse:
    """Provide information about the MCP server and how to connect to it."""
    host = request.url.hostname or "localhost"
    port = request.url.port or 8000
    return JSONResponse({
        "server": "Itemset Frequency Bounds MCP Server",
        "transport": "streamable-http",
        "mcp_endpoint": f"http://{host}:{port}/mcp",
        "health_endpoint": f"http://{host}:{port}/health",
        "tools": ["get_frequency_bound", "get_safe_set"],
        "data_dir": settings.data_dir,
    })


if __name__ == "__main__":
    mcp.run()
