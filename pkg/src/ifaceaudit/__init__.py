"""Static detection of duplicate and unused interface methods, with cohesion metrics."""

from __future__ import annotations

from .detect import (
    AnomalySet,
    CloneGroup,
    FilterConfig,
    apply_filters,
    detect_anomalies,
)
from .facts import SchemaViolation, dumps, emit_facts, loads, parse_facts
from .metrics import (
    Correlation,
    CorrelationReport,
    InterfaceMetrics,
    SystemMetrics,
    correlate,
    interface_metrics,
    iuc,
    pearson,
    spearman,
    system_metrics,
)
from .model import (
    CallRecord,
    ClassDecl,
    CodeModel,
    InterfaceDecl,
    MethodDecl,
    MethodSignature,
    ModelError,
    TypeRef,
    build_model,
)
from .parser import MalformedFile, parse_source, read_source_dir
from .report import AnalysisResult, InputError, analyze_model, render, run_analysis
from .suggest import RefactoringSuggestion, apply_suggestions, suggest

__version__ = "0.1.0"

__all__ = [
    "AnalysisResult",
    "AnomalySet",
    "CallRecord",
    "ClassDecl",
    "CloneGroup",
    "CodeModel",
    "Correlation",
    "CorrelationReport",
    "FilterConfig",
    "InputError",
    "InterfaceDecl",
    "InterfaceMetrics",
    "MalformedFile",
    "MethodDecl",
    "MethodSignature",
    "ModelError",
    "RefactoringSuggestion",
    "SchemaViolation",
    "SystemMetrics",
    "TypeRef",
    "analyze_model",
    "apply_filters",
    "apply_suggestions",
    "build_model",
    "correlate",
    "detect_anomalies",
    "dumps",
    "emit_facts",
    "interface_metrics",
    "iuc",
    "loads",
    "parse_facts",
    "parse_source",
    "pearson",
    "read_source_dir",
    "render",
    "run_analysis",
    "spearman",
    "suggest",
    "system_metrics",
]
