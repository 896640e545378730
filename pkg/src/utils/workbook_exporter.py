"""
Excel workbook export of benchmark result CSVs
"""

import logging
import os
from typing import Dict, List

import pandas as pd
from openpyxl.styles import Alignment, Font, PatternFill

logger = logging.getLogger(__name__)

# Sheets are written in this order when the CSV is present
RESULT_SHEETS = [
    ("summary.csv", "Summary"),
    ("runs.csv", "Runs"),
    ("depth.csv", "Depth"),
    ("transitions.csv", "Transitions"),
    ("empirical.csv", "Empirical"),
    ("chain.csv", "Chain"),
    ("fixed_point.csv", "Fixed point"),
    ("trajectory.csv", "Trajectory"),
]


class WorkbookExporter:
    """Collects the CSVs of one output directory into a styled workbook"""

    def __init__(self, out_dir: str):
        """Initialize the exporter

        Args:
            out_dir: Directory holding the CSVs of an earlier run
        """
        self.out_dir = out_dir

    def available_sheets(self) -> List[tuple]:
        return [
            (filename, sheet)
            for filename, sheet in RESULT_SHEETS
            if os.path.exists(os.path.join(self.out_dir, filename))
        ]

    def load_frames(self) -> Dict[str, pd.DataFrame]:
        """Read every known CSV present in the directory, keyed by sheet name"""
        return {
            sheet: pd.read_csv(os.path.join(self.out_dir, filename))
            for filename, sheet in self.available_sheets()
        }

    def export(self, file_path: str) -> List[str]:
        """Write one sheet per CSV

        Args:
            file_path: Path of the workbook to create

        Returns:
            Names of the sheets written

        Raises:
            FileNotFoundError: If the directory holds none of the result CSVs
        """
        frames = self.load_frames()
        if not frames:
            raise FileNotFoundError(f"no result CSVs found in {self.out_dir}")

        with pd.ExcelWriter(file_path, engine="openpyxl") as writer:
            for sheet, df in frames.items():
                df.to_excel(writer, sheet_name=sheet, index=False)
                self._style_sheet(writer.sheets[sheet])

        logger.info("Wrote workbook %s with sheets %s", file_path, ", ".join(frames))
        return list(frames)

    def _style_sheet(self, worksheet):
        """Bold header on a blue fill and column widths fitted to the content"""
        header_font = Font(bold=True, color="FFFFFF")
        header_fill = PatternFill(start_color="366092", end_color="366092", fill_type="solid")
        header_alignment = Alignment(horizontal="center", vertical="center")

        for cell in worksheet[1]:
            cell.font = header_font
            cell.fill = header_fill
            cell.alignment = header_alignment

        for column in worksheet.columns:
            max_length = max(len(str(cell.value)) for cell in column if cell.value is not None)
            # Min 10, max 40 characters
            worksheet.column_dimensions[column[0].column_letter].width = min(max(max_length + 2, 10), 40)
        worksheet.freeze_panes = "A2"
