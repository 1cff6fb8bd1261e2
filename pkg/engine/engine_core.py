# engine_core.py
# Command-line parsing, logging setup and exit-code mapping.

import argparse
import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

from core.check_events import CheckEvent, EventType
from core.check_events_manager import CheckEventManager
from core.errors import (
    BudgetExceeded,
    FixedPointCapExceeded,
    SandpileError,
    ToppleCapExceeded,
    UsageError,
)
from engine.commands import EXIT_BUDGET, EXIT_FALSE, EXIT_USAGE, CommandResult, CommandRunner
from engine.input_handler import InputHandler
from engine.run_config import build_run_config, load_config

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'


def setup_logging(level: str = "WARNING", save_logs: bool = False, log_path: str = "logs/") -> Optional[Path]:
    """
    Configure logging for a run.

    Console output goes to stderr so stdout carries nothing but the report.
    Returns the log file path when save_logs is set.
    """
    numeric_level = getattr(logging, str(level).upper(), None)
    if not isinstance(numeric_level, int):
        raise UsageError(f"unknown log level {level!r}")

    root_logger = logging.getLogger()
    # Drop handlers from an earlier call in the same process
    for handler in list(root_logger.handlers):
        if getattr(handler, "sandpile_handler", False):
            root_logger.removeHandler(handler)
            handler.close()

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(logging.Formatter(LOG_FORMAT, DATE_FORMAT))
    console_handler.sandpile_handler = True
    root_logger.addHandler(console_handler)
    root_logger.setLevel(numeric_level)

    log_file = None
    if save_logs:
        log_dir = Path(log_path)
        log_dir.mkdir(parents=True, exist_ok=True)
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        log_file = log_dir / f"sandpile_{timestamp}.log"
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT, DATE_FORMAT))
        file_handler.sandpile_handler = True
        root_logger.addHandler(file_handler)

    # Reports contain Δ, χ and friends
    if sys.stdout.encoding and sys.stdout.encoding.lower() != 'utf-8':
        sys.stdout.reconfigure(encoding='utf-8')

    return log_file


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--matrix", help="path to a matrix JSON file {\"n\": .., \"rows\": [[..], ..]}")
    common.add_argument("--rate", help="rate vector r, e.g. 2,1 (default: 1·adj(Δ))")
    common.add_argument("--budget-omega", type=int, help="largest Ω(r) a brute-force scan may visit")
    common.add_argument("--budget-box", type=int, help="largest stable box an enumeration may visit")
    common.add_argument("--budget-topples", type=int, help="most single topplings one stabilization may perform")
    common.add_argument("--seed", type=int, help="seed for random policies and the self-test")
    common.add_argument("--json", action="store_true", default=None, help="emit JSON instead of text")
    common.add_argument("--witness", action="store_true", default=None, help="include sequences and witnesses")
    common.add_argument("--dot", help="write the digraph in DOT format to this path")
    common.add_argument("--policy", choices=["lowest", "highest", "random"], help="vertex choice policy")
    common.add_argument("--config", help="path to config.yaml")
    common.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="console log level")

    parser = argparse.ArgumentParser(
        prog="sandpile",
        description="Parking functions and recurrent configurations over toppling matrices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check that the matrix is toppling")

    for name in ("parking", "recurrent"):
        command = sub.add_parser(name, parents=[common], help=f"test or enumerate {name} vectors")
        command.add_argument("action", choices=["test", "enumerate"])
        command.add_argument("vector", nargs="?", help="vector for 'test', e.g. 1,3")

    sub.add_parser("bijection", parents=[common], help="check d - f maps P onto R")
    classes = sub.add_parser("classes", parents=[common], help="lattice classes and recurrent representatives")
    classes.add_argument("vectors", nargs="+", help="integer vectors, e.g. '(-1,-1)' 0,0")
    stabilize = sub.add_parser("stabilize", parents=[common], help="stabilize a configuration")
    stabilize.add_argument("vector")
    sub.add_parser("digraph", parents=[common], help="build the sandpile digraph and count arborescences")
    sub.add_parser("selftest", parents=[common], help="run the golden fixtures and property battery")
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    rate = InputHandler().parse_vector(args.rate) if args.rate is not None else None
    return {
        "matrix": args.matrix,
        "rate": rate,
        "budget_omega": args.budget_omega,
        "budget_box": args.budget_box,
        "budget_topples": args.budget_topples,
        "seed": args.seed,
        "json": args.json,
        "witness": args.witness,
        "dot": args.dot,
        "policy": args.policy,
        "log_level": args.log_level,
    }


def _log_check_event(event: CheckEvent) -> None:
    if event.type == EventType.CHECK_FAILED:
        logger.warning(f"Criterion {event.data['criterion']} failed: {event.data['detail']}")
    elif event.type == EventType.BUDGET_REFUSED:
        logger.info(f"Budget refused during self-test: {event.data}")
    else:
        logger.debug(f"{event.type.value}: {event.data}")


def dispatch(runner: CommandRunner, args: argparse.Namespace) -> CommandResult:
    command = args.command
    if command == "validate":
        return runner.cmd_validate()
    if command in ("parking", "recurrent"):
        if args.action == "test" and args.vector is None:
            raise UsageError(f"{command} test needs a vector")
        handler = runner.cmd_parking if command == "parking" else runner.cmd_recurrent
        return handler(args.action, args.vector)
    if command == "bijection":
        return runner.cmd_bijection()
    if command == "classes":
        return runner.cmd_classes(args.vectors)
    if command == "stabilize":
        return runner.cmd_stabilize(args.vector)
    if command == "digraph":
        return runner.cmd_digraph()
    if command == "selftest":
        return runner.cmd_selftest()
    raise UsageError(f"unknown command {command!r}")


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main entry point. Returns the process exit code:
    0 true/success, 1 false/violation, 2 usage, 3 budget refusal.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    try:
        config = build_run_config(load_config(args.config), _overrides(args))
        setup_logging(config.logging.level, config.logging.save_logs, config.logging.log_path)
        if args.command != "selftest" and not config.input_path:
            raise UsageError(f"{args.command} needs --matrix")

        event_manager = CheckEventManager()
        event_manager.subscribe_all(_log_check_event)
        runner = CommandRunner(config, event_manager)
        logger.info(f"Running {args.command} with seed {config.seed}")
        result = dispatch(runner, args)
    except BudgetExceeded as e:
        print(f"budget refused: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (ToppleCapExceeded, FixedPointCapExceeded) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FALSE
    except SandpileError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:
        logger.error(f"Run crashed: {str(e)}", exc_info=True)
        raise

    sys.stdout.write(result.render(config.as_json))
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
