"""Guideline-grounded clinical question answering.

Routes questions to guideline sections, retrieves evidence in strict
clinical-priority order (recommendations > criteria tables > narrative),
generates cited two-part answers, validates every numeric claim against the
retrieved evidence before release, and scores a seven-item diabetes risk
questionnaire.
"""

__version__ = "0.1.0"
