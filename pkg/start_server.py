#!/usr/bin/env python3
"""
Itemset Bounds MCP Server Launcher
Checks environment and starts the MCP server with proper configuration.
"""

import os
import sys
import argparse
from pathlib import Path


def check_environment():
    """Check that the settings parse and the data directory holds family files."""
    from dotenv import load_dotenv
    from itembound.config import Settings
    from itembound.errors import ConfigurationError

    if Path(".env").exists():
        load_dotenv()
        print("✅ Environment file loaded")

    try:
        settings = Settings.from_env()
    except ConfigurationError as e:
        print(f"❌ Invalid configuration: {e}")
        return None

    data_dir = Path(settings.data_dir)
    if not data_dir.is_dir():
        print(f"❌ Data directory not found: {data_dir}")
        print("\n💡 Set ITEMBOUND_DATA_DIR to the directory holding your family files.")
        return None

    families = sorted(p.name for p in data_dir.glob("*.family"))
    if families:
        print(f"✅ Found {len(families)} family files in {data_dir}: {', '.join(families)}")
    else:
        print(f"⚠️  No .family files in {data_dir} - create one with `python -m itembound mine`")
    return settings


def check_dependencies():
    """Check that the server and library dependencies import."""
    missing = []
    for module in ("fastmcp", "networkx", "numpy", "dotenv", "tqdm"):
        try:
            __import__(module)
        except ImportError:
            missing.append(module)
    if missing:
        print(f"❌ Missing dependencies: {', '.join(missing)}")
        print("\n💡 Install them with:")
        print("   pip install -r requirements.txt")
        return False
    return True


def parse_args():
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(description='Itemset Bounds MCP Server Launcher')
    parser.add_argument('--http', action='store_true',
                        help='Serve over Streamable HTTP instead of stdio')
    parser.add_argument('--host', default='0.0.0.0',
                        help='Host to bind to in HTTP mode (default: 0.0.0.0)')
    parser.add_argument('--port', type=int, default=8000,
                        help='Port to bind to in HTTP mode (default: 8000)')
    parser.add_argument('--path', default='/mcp',
                        help='Path for MCP endpoint in HTTP mode (default: /mcp)')
    parser.add_argument('--data-dir', default=None,
                        help='Directory of .family files (overrides ITEMBOUND_DATA_DIR)')
    return parser.parse_args()


def main():
    """Check the environment, then hand over to the MCP server."""
    args = parse_args()

    print("🚀 Itemset Bounds MCP Server Launcher")
    print("=" * 40)

    if not check_dependencies():
        sys.exit(1)
    print("✅ Dependencies verified")

    # server.py reads its settings at import time
    if args.data_dir:
        os.environ["ITEMBOUND_DATA_DIR"] = args.data_dir
    settings = check_environment()
    if settings is None:
        sys.exit(1)

    run_kwargs = {}
    if args.http:
        run_kwargs = {"transport": "streamable-http", "host": args.host,
                      "port": args.port, "path": args.path}
        print(f"\n🌐 Serving {settings.data_dir} over Streamable HTTP at "
              f"http://{args.host}:{args.port}{args.path}")
        print(f"   Health check: http://{args.host}:{args.port}/health")
    else:
        print(f"\n🎯 Serving {settings.data_dir} over stdio")
    print("   Press Ctrl+C to stop")
    print("-" * 40)

    try:
        from server import mcp
        mcp.run(**run_kwargs)
    except KeyboardInterrupt:
        print("\n\n👋 Server stopped by user")
    except Exception as e:
        print(f"\n❌ Server error: {e}")
        sys.exit(1)


if __name__ == "__main__":
    main()
