"""MCP Server for tensor-envelope - the CLI commands as tools"""

import asyncio
import json
from pathlib import Path
from mcp.server import Server
from mcp.server.stdio import stdio_server
from mcp.types import Tool, TextContent

# Add parent directory to path for imports
import sys
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from src.cli.app import EXIT_OK, EXIT_VERIFY_FAILED, Request, run
from src.core.verification import SUITES

# Initialize server
server = Server("tensor-envelope")


BACKEND = {
    "type": "string",
    "enum": ["finset", "opset"],
    "description": "後端範疇：finset（有限集合）或 opset（有限集合的對偶）",
    "default": "opset"
}

DEGREE = {
    "type": "string",
    "enum": ["one", "zero-noniso", "t-power"],
    "description": "次數函數 δ；t-power 僅適用於 opset"
}

BASIS = {
    "type": "string",
    "enum": ["rel", "round", "curly", "gluing"],
    "description": "基底：rel（關係基底）、round (r)、curly {r}、gluing（黏合，僅 opset）",
    "default": "curly"
}

EVAL_AT = {
    "type": "string",
    "description": "將所有多項式在此有理數處求值，例如 '3' 或 '1/2'"
}


def size(description: str) -> dict:
    return {"type": "integer", "minimum": 0, "description": description}


def text(description: str) -> dict:
    return {"type": "string", "description": description}


def schema(required: list[str], **properties) -> dict:
    return {
        "type": "object",
        "properties": {"backend": BACKEND, "degree": DEGREE, "eval_at": EVAL_AT, **properties},
        "required": required
    }


@server.list_tools()
async def list_tools() -> list[Tool]:
    """List available tools"""
    return [
        Tool(
            name="homdim",
            description="計算 Hom([x]*, [y]*) 的維數（或在 rel 基底下 Hom([x], [y]) 的維數）",
            inputSchema=schema(["x", "y"], basis=BASIS, x=size("x 的載體大小"), y=size("y 的載體大小"))
        ),
        Tool(
            name="compose",
            description="計算兩個基底元素的合成 g∘f，以所選基底表示結果",
            inputSchema=schema(
                ["x", "y", "z", "f", "g"],
                basis=BASIS,
                x=size("x 的載體大小"),
                y=size("y 的載體大小"),
                z=size("z 的載體大小"),
                f=text("x→y 的關係或黏合（標準文字形式，如 '[[0],[1]]'）"),
                g=text("y→z 的關係或黏合")
            )
        ),
        Tool(
            name="tensor",
            description="計算兩個基底元素的張量積，回傳張量分解上的區塊矩陣",
            inputSchema=schema(
                ["x", "y", "x2", "y2", "f", "g"],
                basis=BASIS,
                x=size("第一個因子的定義域大小"),
                y=size("第一個因子的值域大小"),
                x2=size("第二個因子的定義域大小"),
                y2=size("第二個因子的值域大小"),
                f=text("x→y 的關係"),
                g=text("x2→y2 的關係")
            )
        ),
        Tool(
            name="convert",
            description="在 (r) 與 {r} 基底之間轉換，或將 (r) 以黏合基底展開",
            inputSchema=schema(
                ["x", "y", "f"],
                basis=BASIS,
                x=size("x 的載體大小"),
                y=size("y 的載體大小"),
                f=text("R(x,y) 中的關係")
            )
        ),
        Tool(
            name="omega",
            description="計算滿射 e: x↠y 的 ω_e 多項式",
            inputSchema=schema(
                ["x", "y", "f"],
                x=size("定義域大小"),
                y=size("值域大小"),
                f=text("函數表，如 '[0,0,1]'（opset 的表由值域載體映到定義域載體）")
            )
        ),
        Tool(
            name="mobius",
            description="列出子物件格（可含 Möbius 表），或計算 μ(u, w)",
            inputSchema=schema(
                ["x"],
                x=size("物件大小"),
                u=text("下方子物件"),
                w=text("上方子物件"),
                with_mobius={"type": "boolean", "description": "是否輸出完整 Möbius 表", "default": False}
            )
        ),
        Tool(
            name="decompose",
            description="子物件分解 [x] = ⊕[u]*，或張量分解 [x]*⊗[y]*（多因子用 sizes）",
            inputSchema=schema(
                [],
                x=size("物件大小"),
                y=size("第二個因子大小（張量分解）"),
                sizes=text("以逗號分隔的因子大小，如 '1,1,1'")
            )
        ),
        Tool(
            name="table",
            description="End([x]*) 的乘法表（結構常數）",
            inputSchema=schema(["x"], basis=BASIS, x=size("物件大小"))
        ),
        Tool(
            name="verify",
            description="執行不變量驗證套件並回報通過／失敗數",
            inputSchema={
                "type": "object",
                "properties": {
                    "suites": {
                        "type": "array",
                        "items": {"type": "string", "enum": list(SUITES)},
                        "description": "要執行的套件，預設全部"
                    },
                    "max_size": {"type": "integer", "minimum": 1, "description": "掃描的載體大小上限"},
                    "workers": {"type": "integer", "minimum": 1, "description": "工作執行緒數"}
                }
            }
        ),
    ]


@server.call_tool()
async def call_tool(name: str, arguments: dict) -> list[TextContent]:
    """Handle tool calls"""
    try:
        if name == "verify":
            return await handle_verify(arguments)
        elif name in ("homdim", "compose", "tensor", "convert", "omega", "mobius", "decompose", "table"):
            return await handle_command(name, arguments)
        else:
            return [TextContent(
                type="text",
                text=json.dumps({"error": f"Unknown tool: {name}"}, ensure_ascii=False)
            )]
    except Exception as e:
        return [TextContent(
            type="text",
            text=json.dumps({
                "success": False,
                "error": str(e)
            }, ensure_ascii=False)
        )]


async def handle_command(name: str, arguments: dict) -> list[TextContent]:
    """Handle the computation tools through the CLI request path"""
    request = Request(command=name, **arguments)
    doc, status = await asyncio.to_thread(run, request)
    response = {"success": status == EXIT_OK, **doc}
    return [TextContent(
        type="text",
        text=json.dumps(response, ensure_ascii=False, indent=2)
    )]


async def handle_verify(arguments: dict) -> list[TextContent]:
    """Handle verify tool"""
    suites = arguments.get("suites") or []
    request = Request(
        command="verify",
        suites=suites,
        all_suites=not suites,
        max_size=arguments.get("max_size"),
        workers=arguments.get("workers")
    )
    doc, status = await asyncio.to_thread(run, request)
    response = {
        "success": status == EXIT_OK,
        "message": f"{doc.get('checks', 0)} 項檢查，{doc.get('failures', 0)} 項失敗"
        if status in (EXIT_OK, EXIT_VERIFY_FAILED) else "驗證未能執行",
        **doc
    }
    return [TextContent(
        type="text",
        text=json.dumps(response, ensure_ascii=False, indent=2)
    )]


def main():
    """Main entry point"""
    async def run_server():
        async with stdio_server() as (read_stream, write_stream):
            await server.run(
                read_stream,
                write_stream,
                server.create_initialization_options()
            )

    asyncio.run(run_server())


if __name__ == "__main__":
    main()
