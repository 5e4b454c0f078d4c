"""Reverse-mode automatic differentiation over tensor-core operations."""
from sdvsr.autograd import functional
from sdvsr.autograd.gradcheck import GradCheckReport, grad_check
from sdvsr.autograd.tape import Function, GradientTable, Record, Tape, Variable

__all__ = [
    "Function",
    "GradCheckReport",
    "GradientTable",
    "Record",
    "Tape",
    "Variable",
    "functional",
    "grad_check",
]
