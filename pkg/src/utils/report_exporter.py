"""
PDF report of a benchmark output directory
"""

import logging
import os
from datetime import datetime
from typing import List, Optional

import pandas as pd
from reportlab.lib import colors
from reportlab.lib.pagesizes import A4
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.lib.units import inch
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

logger = logging.getLogger(__name__)

MAX_TABLE_ROWS = 40


class ReportExporter:
    """Builds a short PDF from the summary, depth, Markov and dynamics CSVs"""

    def __init__(self, out_dir: str, experiment_name: Optional[str] = None):
        self.out_dir = out_dir
        self.experiment_name = experiment_name or os.path.basename(os.path.abspath(out_dir))
        self.styles = getSampleStyleSheet()

    def _frame(self, filename: str) -> Optional[pd.DataFrame]:
        path = os.path.join(self.out_dir, filename)
        return pd.read_csv(path) if os.path.exists(path) else None

    def export(self, file_path: str, title: Optional[str] = None) -> List[str]:
        """Write the report

        Args:
            file_path: Path of the PDF to create
            title: Document title, the experiment name by default

        Returns:
            Headings of the sections that had data
        """
        doc = SimpleDocTemplate(file_path, pagesize=A4,
                                leftMargin=0.75 * inch, rightMargin=0.75 * inch,
                                topMargin=1 * inch, bottomMargin=0.75 * inch)
        story = []

        title_style = ParagraphStyle(
            "ReportTitle",
            parent=self.styles["Heading1"],
            fontSize=20,
            spaceAfter=30,
            alignment=1,
            textColor=colors.darkblue,
        )
        story.append(Paragraph(title or self.experiment_name, title_style))

        date_style = ParagraphStyle(
            "DateStyle",
            parent=self.styles["Normal"],
            fontSize=10,
            alignment=1,
            spaceAfter=20,
            textColor=colors.grey,
        )
        current_date = datetime.now().strftime("%B %d, %Y at %I:%M %p")
        story.append(Paragraph(f"Generated on {current_date}", date_style))

        sections = []
        summary = self._frame("summary.csv")
        if summary is not None:
            sections.append("Training summary")
            self._add_table(story, "Training summary", summary)

        depth = self._frame("depth.csv")
        if depth is not None:
            sections.append("Layer update cost by depth")
            first_layer = depth[depth["layer_index"] == 0].drop(columns=["wall_ns"])
            self._add_table(story, "Layer update cost by depth", first_layer)

        transitions = self._frame("transitions.csv")
        empirical = self._frame("empirical.csv")
        if transitions is not None and empirical is not None:
            sections.append("Markov chain")
            deviation = (transitions.iloc[:, 1:] - empirical.iloc[:, 1:]).abs().to_numpy().max()
            story.append(Paragraph("Markov chain", self.styles["Heading2"]))
            story.append(Paragraph(
                f"Largest deviation between exact and empirical transitions: {deviation:.4g}",
                self.styles["Normal"],
            ))
            self._add_table(story, None, transitions)

        fixed_point = self._frame("fixed_point.csv")
        if fixed_point is not None:
            sections.append("Neuron dynamics")
            self._add_table(story, "Neuron dynamics", fixed_point)

        if not sections:
            story.append(Paragraph("No results found.", self.styles["Normal"]))

        doc.build(story)
        logger.info("Wrote report %s (%s)", file_path, ", ".join(sections) or "empty")
        return sections

    def _add_table(self, story: List, heading: Optional[str], df: pd.DataFrame):
        """Append a heading and a styled table of at most ``MAX_TABLE_ROWS`` rows"""
        if heading:
            story.append(Paragraph(heading, self.styles["Heading2"]))
        shown = df.head(MAX_TABLE_ROWS)
        table_data = [list(shown.columns)]
        for row in shown.itertuples(index=False):
            table_data.append([self._format_cell(value) for value in row])

        table = Table(table_data, repeatRows=1)
        table.setStyle(TableStyle([
            ("BACKGROUND", (0, 0), (-1, 0), colors.darkblue),
            ("TEXTCOLOR", (0, 0), (-1, 0), colors.whitesmoke),
            ("FONTNAME", (0, 0), (-1, 0), "Helvetica-Bold"),
            ("FONTSIZE", (0, 0), (-1, 0), 7),
            ("FONTNAME", (0, 1), (-1, -1), "Helvetica"),
            ("FONTSIZE", (0, 1), (-1, -1), 7),
            ("ALIGN", (0, 1), (-1, -1), "RIGHT"),
            ("GRID", (0, 0), (-1, -1), 0.5, colors.black),
            ("ROWBACKGROUNDS", (0, 1), (-1, -1), [colors.white, colors.lightgrey]),
        ]))
        story.append(table)
        if len(df) > MAX_TABLE_ROWS:
            story.append(Paragraph(f"{len(df) - MAX_TABLE_ROWS} more rows in the CSV.",
                                   self.styles["Italic"]))
        story.append(Spacer(1, 20))

    @staticmethod
    def _format_cell(value) -> str:
        if isinstance(value, float):
            return "" if pd.isna(value) else f"{value:.4g}"
        return str(value)
