"""Tracing helpers built on OpenTelemetry."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

from opentelemetry import trace
from opentelemetry.exporter.otlp.proto.grpc.trace_exporter import OTLPSpanExporter
from opentelemetry.sdk.trace import TracerProvider
from opentelemetry.sdk.trace.export import (
    BatchSpanProcessor,
    ConsoleSpanExporter,
    SimpleSpanProcessor,
)
from opentelemetry.trace import Tracer

from gcasim import __version__

if TYPE_CHECKING:  # pragma: no cover - typing only
    from .config import TelemetryConfig

logger = logging.getLogger(__name__)

_TRACERS: dict[str, Tracer] = {}
_TRACER_PROVIDER: TracerProvider | None = None


def get_tracer(name: str = "gcasim") -> Tracer:
    """Tracer for one instrumentation scope.

    Tracers obtained before `init_tracing` are proxies and start exporting once a
    provider is installed, so modules can create theirs at import time.
    """
    tracer = _TRACERS.get(name)
    if tracer is None:
        tracer = trace.get_tracer(name, __version__)
        _TRACERS[name] = tracer
    return tracer


def init_tracing(config: TelemetryConfig) -> TracerProvider:
    """Install a provider exporting to OTLP, or to the console when no endpoint is set."""
    global _TRACER_PROVIDER

    provider = TracerProvider(resource=config.resource())
    if config.otlp_traces_endpoint:
        exporter = OTLPSpanExporter(endpoint=config.otlp_traces_endpoint, insecure=True)
        provider.add_span_processor(BatchSpanProcessor(exporter))
    else:
        provider.add_span_processor(SimpleSpanProcessor(ConsoleSpanExporter()))

    trace.set_tracer_provider(provider)
    _TRACER_PROVIDER = provider
    _TRACERS.clear()
    logger.info(
        "tracing_initialised", extra={"endpoint": config.otlp_traces_endpoint or "console"}
    )
    return provider


def shutdown_tracing() -> None:
    """Flush pending spans; a no-op when tracing was never initialised."""
    global _TRACER_PROVIDER
    if _TRACER_PROVIDER is None:
        return
    _TRACER_PROVIDER.force_flush()
    _TRACER_PROVIDER.shutdown()
    _TRACER_PROVIDER = None
