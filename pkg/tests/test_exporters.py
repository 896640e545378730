import logging

import pandas as pd
import pytest
from openpyxl import load_workbook

from src.records.run_store import write_csv
from src.utils.logging_setup import ENV_VAR, configure_logging, resolve_level
from src.utils.report_exporter import ReportExporter
from src.utils.workbook_exporter import WorkbookExporter


@pytest.fixture
def results_dir(tmp_path):
    write_csv(pd.DataFrame({"method": ["derivative_free"], "learning_rate": [None],
                            "median_iterations_to_accuracy": [1.0]}),
              str(tmp_path / "summary.csv"))
    write_csv(pd.DataFrame({"neuron": [0, 1], "z_euler": [0.5, 0.5], "z_picard": [0.5, 0.5],
                            "abs_difference": [0.0, 0.0]}),
              str(tmp_path / "fixed_point.csv"))
    return tmp_path


def test_workbook_has_one_sheet_per_csv(results_dir):
    path = results_dir / "results.xlsx"
    assert WorkbookExporter(str(results_dir)).export(str(path)) == ["Summary", "Fixed point"]

    workbook = load_workbook(path)
    assert workbook.sheetnames == ["Summary", "Fixed point"]
    sheet = workbook["Summary"]
    assert sheet["A1"].value == "method"
    assert sheet["A1"].font.bold
    assert sheet.freeze_panes == "A2"


def test_workbook_needs_results(tmp_path):
    with pytest.raises(FileNotFoundError):
        WorkbookExporter(str(tmp_path)).export(str(tmp_path / "results.xlsx"))


def test_report_sections(results_dir):
    path = results_dir / "report.pdf"
    sections = ReportExporter(str(results_dir), "unit").export(str(path))
    assert sections == ["Training summary", "Neuron dynamics"]
    assert path.read_bytes().startswith(b"%PDF")


def test_report_of_empty_directory(tmp_path):
    assert ReportExporter(str(tmp_path)).export(str(tmp_path / "report.pdf")) == []


def test_long_tables_are_cut(tmp_path):
    write_csv(pd.DataFrame({"neuron": range(100), "z_euler": 0.5, "z_picard": 0.5,
                            "abs_difference": 0.0}),
              str(tmp_path / "fixed_point.csv"))
    assert ReportExporter(str(tmp_path)).export(str(tmp_path / "report.pdf")) == ["Neuron dynamics"]


@pytest.mark.parametrize("name, level", [
    ("debug", logging.DEBUG),
    (" INFO ", logging.INFO),
    ("error", logging.ERROR),
    ("verbose", logging.WARNING),
    (None, logging.WARNING),
])
def test_resolve_level(name, level):
    assert resolve_level(name) == level


def test_configure_logging_reads_environment(monkeypatch):
    monkeypatch.setenv(ENV_VAR, "debug")
    logger = configure_logging()
    assert logger.level == logging.DEBUG
    configure_logging("info")
    handlers = [h for h in logger.handlers if getattr(h, "_qpw_handler", False)]
    assert len(handlers) == 1
    assert logger.level == logging.INFO
