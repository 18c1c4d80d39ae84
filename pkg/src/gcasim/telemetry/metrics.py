"""Metrics helper utilities."""

from __future__ import annotations

import logging
from collections.abc import Mapping
from typing import TYPE_CHECKING

from opentelemetry import metrics as otel_metrics
from opentelemetry.exporter.otlp.proto.grpc.metric_exporter import OTLPMetricExporter
from opentelemetry.metrics import Counter, Meter
from opentelemetry.sdk.metrics import MeterProvider
from opentelemetry.sdk.metrics.export import PeriodicExportingMetricReader

from gcasim import __version__

if TYPE_CHECKING:  # pragma: no cover
    from .config import TelemetryConfig

logger = logging.getLogger(__name__)

EXPORT_INTERVAL_MS = 5000

_METER_PROVIDER: MeterProvider | None = None
_METERS: dict[str, Meter] = {}
_COUNTERS: dict[str, Counter] = {}

MetricAttributes = Mapping[str, str | bool | int | float]


def get_meter(name: str = "gcasim") -> Meter:
    meter = _METERS.get(name)
    if meter is None:
        meter = otel_metrics.get_meter(name, __version__)
        _METERS[name] = meter
    return meter


def init_metrics(config: TelemetryConfig) -> MeterProvider:
    global _METER_PROVIDER

    readers = []
    if config.otlp_metrics_endpoint:
        exporter = OTLPMetricExporter(endpoint=config.otlp_metrics_endpoint, insecure=True)
        readers.append(
            PeriodicExportingMetricReader(exporter, export_interval_millis=EXPORT_INTERVAL_MS)
        )

    provider = MeterProvider(resource=config.resource(), metric_readers=readers)
    otel_metrics.set_meter_provider(provider)
    _METER_PROVIDER = provider
    _METERS.clear()
    _COUNTERS.clear()
    logger.info("metrics_initialised", extra={"readers": len(readers)})
    return provider


def record_metric(name: str, value: float, attrs: MetricAttributes | None = None) -> None:
    """Add `value` to the counter `name`, creating it on first use."""
    counter = _COUNTERS.get(name)
    if counter is None:
        counter = get_meter().create_counter(name, unit="1")
        _COUNTERS[name] = counter
    counter.add(value, attributes=dict(attrs or {}))


def shutdown_metrics() -> None:
    global _METER_PROVIDER
    if _METER_PROVIDER is None:
        return
    _METER_PROVIDER.force_flush()
    _METER_PROVIDER.shutdown()
    _METER_PROVIDER = None
