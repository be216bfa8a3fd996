"""
Tests for the MCP server tools and routes
"""

import json
from dataclasses import replace
from unittest.mock import Mock

import pytest

import server
from itembound.core import write_family

from .conftest import DATA_DIR


@pytest.fixture
def bundled_data(mocker):
    """Point the server at the bundled data directory."""
    return mocker.patch.object(server, "settings",
                               replace(server.settings, data_dir=str(DATA_DIR)))


@pytest.fixture
def diamond_dir(mocker, diamond_theta, tmp_path):
    write_family(diamond_theta, tmp_path / "diamond.family")
    mocker.patch.object(server, "settings",
                        replace(server.settings, data_dir=str(tmp_path)))
    return tmp_path


class TestFrequencyBoundTool:
    """Test the get_frequency_bound tool."""

    def test_safe_bound(self, bundled_data):
        """Test b & c on the five-row example."""
        result = server.get_frequency_bound("example1", "b & c")
        assert result["lo"] == "1/5"
        assert result["hi"] == "2/5"
        assert result["projection"] == ["a", "b", "c"]
        assert result["variables"] == 8
        assert result["policy"] == "safe"

    def test_file_name_with_suffix(self, bundled_data):
        """Test that the .family suffix may be given."""
        result = server.get_frequency_bound("example1.family", "b & c", "trivial")
        assert (result["lo"], result["hi"]) == ("0", "2/5")

    def test_restricted_metadata(self, diamond_dir):
        """Test that restricted metadata is JSON friendly."""
        result = server.get_frequency_bound("diamond", "b & c", "restricted:3")
        assert result["projection"] == ["b", "c", "d"]
        assert result["metadata"]["within_budget"] is True
        assert result["metadata"]["removed_edges"] == "[('a', 'b'), ('a', 'c')]"

    @pytest.mark.parametrize("family,query,error", [
        ("missing", "a", "FileNotFoundError"),
        ("../spec.md", "a", "ValueError"),
        ("/etc/passwd", "a", "ValueError"),
        ("example1", "b &", "QuerySyntaxError"),
        ("example1", "z", "UnknownAttributeError"),
    ])
    def test_error_records(self, bundled_data, family, query, error):
        """Test that failures come back as error records."""
        result = server.get_frequency_bound(family, query)
        assert result["error"] == error
        assert result["message"]

    def test_bad_policy(self, bundled_data):
        """Test an unknown policy name."""
        result = server.get_frequency_bound("example1", "a", "greedy")
        assert result["error"] == "ValueError"


class TestSafeSetTool:
    """Test the get_safe_set tool."""

    def test_minimal(self, bundled_data):
        """Test the minimal safe set of {b,c}."""
        assert server.get_safe_set("example1", "b, c") == {"safe_set": ["a", "b", "c"]}

    def test_restricted(self, diamond_dir):
        """Test a restricted safe set with removed dependencies."""
        result = server.get_safe_set("diamond", "b,c", max_size=3)
        assert result["safe_set"] == ["b", "c", "d"]
        assert result["removed_edges"] == [["a", "b"], ["a", "c"]]
        assert result["within_budget"] is True
        assert result["exact"] is True

    def test_inexact(self, diamond_dir):
        """Test that cutting dependent edges is flagged."""
        result = server.get_safe_set("diamond", "b,c", max_size=2)
        assert result["safe_set"] == ["b", "c"]
        assert result["exact"] is False

    def test_unknown_attribute(self, bundled_data):
        """Test an attribute outside the family."""
        result = server.get_safe_set("example1", "b,z")
        assert result["error"] == "UnknownAttributeError"


class TestRoutes:
    """Test the HTTP helper routes."""

    def test_health(self):
        """Test the health check."""
        response = server.health_check(Mock())
        assert json.loads(response.body) == {"status": "ok"}

    def test_info(self, bundled_data):
        """Test that the info route reports the request host."""
        request = Mock()
        request.url.hostname = "example.org"
        request.url.port = 9000
        info = json.loads(server.server_info(request).body)
        assert info["mcp_endpoint"] == "http://example.org:9000/mcp"
        assert info["tools"] == ["get_frequency_bound", "get_safe_set"]
        assert info["data_dir"] == str(DATA_DIR)
