#!/usr/bin/env python3
"""MCP server exposing locus verification, generators, psi and Hadamard chains as tools"""

import asyncio
import json
import logging
from typing import Any, Dict, List, Optional

from mcp.server import NotificationOptions, Server
from mcp.server.models import InitializationOptions
from mcp.server.stdio import stdio_server
from mcp.types import TextContent, Tool

from . import __version__
from .baker import berest_psi, potential_from_config, verify_eigen, verify_symmetry
from .configuration import dumps, loads
from .errors import NonTerminating
from .families import create_family, family_names
from .huygens import huygens_certificate
from .locus import verify_locus
from .onedim import adler_moser, adler_moser_tau
from .settings import Settings, configure_logging

logger = logging.getLogger(__name__)

CONFIG_PROPERTY = {"type": "string", "description": "Configuration document (JSON text)"}


class LocusLabServer:
    """MCP server for locus computations"""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or Settings.from_env()
        self.server = Server("locuslab")
        self._setup_handlers()

    def _setup_handlers(self) -> None:
        """Set up MCP protocol handlers"""

        @self.server.list_tools()
        async def list_tools() -> List[Tool]:
            return [
                Tool(
                    name="verify_locus",
                    description="Check the locus equations of a hyperplane configuration",
                    inputSchema={
                        "type": "object",
                        "properties": {
                            "config": CONFIG_PROPERTY,
                            "mode": {
                                "type": "string",
                                "description": "Zero test: exact or probabilistic",
                                "default": "exact",
                            },
                        },
                        "required": ["config"],
                    },
                ),
                Tool(
                    name="generate_configuration",
                    description=f"Build a configuration from a family ({', '.join(family_names())})",
                    inputSchema={
                        "type": "object",
                        "properties": {
                            "family": {"type": "string", "description": "Family name"},
                            "params": {"type": "object", "description": "Family parameters, e.g. {\"n\": 2, \"m\": 1}"},
                        },
                        "required": ["family"],
                    },
                ),
                Tool(
                    name="build_psi",
                    description="Baker-Akhiezer function by Berest's formula, with eigen and symmetry checks",
                    inputSchema={"type": "object", "properties": {"config": CONFIG_PROPERTY}, "required": ["config"]},
                ),
                Tool(
                    name="hadamard_certificate",
                    description="Hadamard chain, its verification and the minimal odd dimension N",
                    inputSchema={"type": "object", "properties": {"config": CONFIG_PROPERTY}, "required": ["config"]},
                ),
                Tool(
                    name="adler_moser",
                    description="Adler-Moser chain, Wronskian and potential at level m",
                    inputSchema={
                        "type": "object",
                        "properties": {
                            "m": {"type": "integer", "description": "Level"},
                            "tau": {"type": "string", "description": "Scalar literal; sets c_2 = -tau/3"},
                            "constants": {"type": "array", "items": {"type": "string"}},
                        },
                        "required": ["m"],
                    },
                ),
            ]

        @self.server.call_tool()
        async def call_tool(name: str, arguments: Dict[str, Any]) -> List[TextContent]:
            try:
                handlers = {
                    "verify_locus": self._verify_locus,
                    "generate_configuration": self._generate_configuration,
                    "build_psi": self._build_psi,
                    "hadamard_certificate": self._hadamard_certificate,
                    "adler_moser": self._adler_moser,
                }
                handler = handlers.get(name)
                if not handler:
                    return [TextContent(type="text", text=f"Error: Unknown tool '{name}'")]
                text = await asyncio.to_thread(handler, **(arguments or {}))
                return [TextContent(type="text", text=text)]
            except Exception as e:
                logger.error(f"Error executing tool {name}: {e}")
                return [TextContent(type="text", text=f"Error: {str(e)}")]

    def _verify_locus(self, config: str, mode: Optional[str] = None) -> str:
        report = verify_locus(loads(config), mode or self.settings.mode, self.settings.jobs, self.settings.seed)
        return report.render()

    def _generate_configuration(self, family: str, params: Optional[Dict[str, Any]] = None) -> str:
        return dumps(create_family(family, **(params or {})).build().sorted())

    def _build_psi(self, config: str) -> str:
        parsed = loads(config)
        try:
            psi = berest_psi(parsed)
        except NonTerminating as e:
            return f"Not a locus configuration: {e}"
        op = potential_from_config(parsed)
        lines = [
            f"M = {psi.M}",
            f"prefactor = {psi.prefactor.format()}",
            f"eigen: {'ok' if verify_eigen(psi, op) else 'FAIL'}",
        ]
        if parsed.is_linear:
            lines.append(f"symmetry: {'ok' if verify_symmetry(psi) else 'FAIL'}")
        return "\n".join(lines)

    def _hadamard_certificate(self, config: str) -> str:
        certificate = huygens_certificate(loads(config), self.settings.mode, self.settings.seed)
        return json.dumps(certificate.to_dict(), indent=2, sort_keys=True)

    def _adler_moser(self, m: int, tau: Optional[str] = None, constants: Optional[List[str]] = None) -> str:
        data = adler_moser_tau(m, tau) if tau is not None else adler_moser(m, constants or [])
        return json.dumps(data.to_dict(), indent=2, sort_keys=True)

    async def run(self):
        """Run the MCP server"""
        async with stdio_server() as (read_stream, write_stream):
            await self.server.run(
                read_stream,
                write_stream,
                InitializationOptions(
                    server_name="locuslab",
                    server_version=__version__,
                    capabilities=self.server.get_capabilities(
                        notification_options=NotificationOptions(), experimental_capabilities={}
                    ),
                ),
            )


def main():
    """Main entry point"""
    settings = Settings.from_env()
    configure_logging(settings)
    server = LocusLabServer(settings)
    asyncio.run(server.run())


if __name__ == "__main__":
    main()
