# -*- coding: utf-8 -*-
"""
Modelos de base de datos para LEADLAG WAVELET
Almacén de réplicas Monte Carlo (sólo inserción)
"""

import logging
from datetime import datetime
from typing import Dict, Any, List, Optional

from sqlalchemy import DateTime, Integer, String, Text, create_engine, select
from sqlalchemy.engine import Engine
from sqlalchemy.orm import DeclarativeBase, Mapped, Session, mapped_column

from config import Config

logger = logging.getLogger(__name__)


class Base(DeclarativeBase):
    pass


class ReplicationRow(Base):
    """
    Una fila por (corrida, réplica, estimador, nivel); una réplica fallida
    se guarda como una sola fila con el mensaje de error
    """

    __tablename__ = 'replicaciones_mc'

    id: Mapped[int] = mapped_column(Integer, primary_key=True, autoincrement=True)
    run_id: Mapped[str] = mapped_column(String(64), index=True)
    replication: Mapped[int] = mapped_column(Integer)
    estimator: Mapped[Optional[str]] = mapped_column(String(16), nullable=True)
    level: Mapped[Optional[int]] = mapped_column(Integer, nullable=True)
    lag: Mapped[Optional[int]] = mapped_column(Integer, nullable=True)
    error: Mapped[Optional[str]] = mapped_column(Text, nullable=True)
    created_at: Mapped[datetime] = mapped_column(DateTime, default=datetime.now)


def get_engine(url: Optional[str] = None) -> Engine:
    """
    Motor SQLAlchemy para el almacén (por defecto Config.DATABASE_URL)
    """
    return create_engine(url or Config.DATABASE_URL)


def create_tables(engine: Engine) -> None:
    """
    Crea las tablas necesarias en la base de datos
    """
    Base.metadata.create_all(engine)
    logger.info("Tablas del almacén de réplicas creadas/verificadas correctamente")


def save_replications(engine: Engine, run_id: str, results: List[Any]) -> Dict[str, Any]:
    """
    Guarda un lote de resultados de réplica

    Args:
        engine: motor SQLAlchemy
        run_id: identificador de la corrida
        results: ReplicationResult con index, lags {estimador: [rezagos]} y error

    Returns:
        Dict con el resultado de la operación
    """
    try:
        rows = []
        for result in results:
            if result.error is not None:
                rows.append(ReplicationRow(run_id=run_id, replication=result.index, error=result.error))
                continue
            for estimator, lags in result.lags.items():
                for position, lag in enumerate(lags):
                    level = 0 if estimator == 'hry' else position + 1
                    rows.append(ReplicationRow(
                        run_id=run_id, replication=result.index,
                        estimator=estimator, level=level, lag=int(lag),
                    ))
        with Session(engine) as session:
            session.add_all(rows)
            session.commit()
        logger.info(f"Guardadas {len(results)} réplicas de la corrida {run_id}")
        return {'success': True, 'rows': len(rows)}

    except Exception as e:
        logger.error(f"Error guardando réplicas de la corrida {run_id}: {e}")
        return {'success': False, 'error': str(e)}


def load_run_estimates(engine: Engine, run_id: str) -> List[Dict[str, Any]]:
    """
    Reconstruye los resultados por réplica de una corrida guardada

    Returns:
        Lista ordenada por réplica de dicts {index, lags, error}
    """
    statement = (
        select(ReplicationRow)
        .where(ReplicationRow.run_id == run_id)
        .order_by(ReplicationRow.replication, ReplicationRow.estimator, ReplicationRow.level)
    )
    replications: Dict[int, Dict[str, Any]] = {}
    with Session(engine) as session:
        for row in session.scalars(statement):
            entry = replications.setdefault(row.replication, {'index': row.replication, 'lags': {}, 'error': None})
            if row.error is not None:
                entry['error'] = row.error
            else:
                entry['lags'].setdefault(row.estimator, []).append(row.lag)
    logger.info(f"Cargadas {len(replications)} réplicas de la corrida {run_id}")
    return [replications[k] for k in sorted(replications)]
