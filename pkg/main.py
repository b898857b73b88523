#!/usr/bin/env python3
"""
Experimentos de muestreo y reconstrucción de campos de Helmholtz en el disco
Punto de entrada principal de la aplicación
"""

import argparse
import asyncio
import logging
import sys
from pathlib import Path
from typing import List, Optional

import structlog

from config.settings import Settings
from application.services.orchestrator import ExperimentOrchestrator
from domain.entities.dictionary_spec import DictionaryKind

COMMANDS = {
    'kbound': "Stability sweep of K(m) -> m,dim,K,alpha,lambda",
    'curve': "Error versus dimension -> method,alpha,dim,mean_rel_l2,std_rel_l2,trials",
    'best': "Best error per method over n -> method,n,best_err,best_dim_or_iters,best_alpha",
    'gcv': "Holdout selection of m -> m,dim,val_mse,selected",
    'gcv-compare': "GCV versus oracle over n -> n,alpha,trial,gcv_m,gcv_err,oracle_m,oracle_err,ratio",
    'synth': "Emit one sampled field -> x,y,r,theta,on_boundary,re_y,im_y",
}


def setup_logging(config: dict):
    """
    Configura el sistema de logging: los registros de la librería estándar
    pasan por el formateador de structlog
    """
    log_level = getattr(logging, str(config.get('level', 'INFO')).upper(), logging.INFO)
    log_file = config.get('file')

    shared_processors = [
        structlog.stdlib.add_log_level,
        structlog.stdlib.add_logger_name,
        structlog.processors.TimeStamper(fmt="iso"),
    ]
    if config.get('json', False):
        renderers = [structlog.processors.format_exc_info, structlog.processors.JSONRenderer()]
    else:
        renderers = [structlog.dev.ConsoleRenderer(colors=False)]

    formatter = structlog.stdlib.ProcessorFormatter(
        foreign_pre_chain=shared_processors,
        processors=[structlog.stdlib.ProcessorFormatter.remove_processors_meta, *renderers],
    )

    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file, mode='a', encoding='utf-8'))

    root = logging.getLogger()
    root.handlers.clear()
    for handler in handlers:
        handler.setFormatter(formatter)
        root.addHandler(handler)
    root.setLevel(log_level)

    structlog.configure(
        processors=[*shared_processors, structlog.stdlib.ProcessorFormatter.wrap_for_formatter],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )

    # Configurar loggers específicos
    logging.getLogger('aiosqlite').setLevel(logging.WARNING)
    logging.getLogger('asyncio').setLevel(logging.WARNING)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Sampling and reconstruction experiments for Helmholtz fields on the unit disk"
    )
    subparsers = parser.add_subparsers(dest='command', required=True)

    for name, help_text in COMMANDS.items():
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument('--config', default='config.yaml', help="YAML configuration file")
        sub.add_argument('--seed', type=int, default=None, help="Override rng.seed")
        sub.add_argument('--output', default=None, help=f"Output CSV (default results/{name}.csv)")
        sub.add_argument('--log-level', default=None,
                         choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'],
                         type=str.upper, help="Override logging.level")
        if name == 'kbound':
            sub.add_argument('--family', default=None,
                             choices=[kind.value for kind in DictionaryKind],
                             help="Override stability.family")
        if name in ('gcv', 'synth'):
            sub.add_argument('--alpha', type=float, default=None, help="Boundary proportion to use")

    return parser


async def main(argv: Optional[List[str]] = None) -> int:
    """
    Función principal de la aplicación
    """
    args = build_parser().parse_args(argv)

    # Cargar configuración
    settings = Settings(args.config)
    settings.apply_overrides(seed=args.seed, log_level=args.log_level)

    # Configurar logging
    setup_logging(settings.get_logging_config())
    logger = logging.getLogger(__name__)

    # Validar configuración
    if not settings.validate_required_config():
        logger.error("Configuration validation failed. Exiting.")
        return 1

    orchestrator = ExperimentOrchestrator(settings.experiment_file)
    logger.info(f"Active configuration: {orchestrator.describe()}")

    options = {}
    if getattr(args, 'family', None):
        options['family'] = args.family
    if getattr(args, 'alpha', None) is not None:
        options['alpha'] = args.alpha

    try:
        result = await orchestrator.execute(args.command, output=args.output, **options)
    finally:
        await orchestrator.stop()

    if not result.success:
        logger.error(result.message)
        return 1

    for path in result.outputs:
        print(path)
    return 0


if __name__ == "__main__":
    try:
        sys.exit(asyncio.run(main()))
    except KeyboardInterrupt:
        print("\nInterrupted")
        sys.exit(1)
    except Exception as e:
        print(f"Fatal error: {e}", file=sys.stderr)
        sys.exit(1)
