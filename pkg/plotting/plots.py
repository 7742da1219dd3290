"""
Plot scripts for the output tables.

The core never renders figures. Each PlotScript writes a small stand-alone Python file that reads a hashed CSV with
pandas and draws it with matplotlib when the user runs it, styled like the project's other figures.
"""
from abc import ABC, abstractmethod
from pathlib import Path

__all__ = ['PlotScript', 'EnergyPlotScript', 'SweepPlotScript', 'TracePlotScript', 'DiagnosticsPlotScript',
           'plot_script_for']


class PlotScript(ABC):
    """
    PlotScript is an abstract class for the text of a plotting script rendering one table.

    It holds the project-wide parts every script needs: imports, reading the table, figure styling, axis labels and
    the save line. Subclasses only supply the lines that draw their series.
    """

    @abstractmethod
    def __init__(self):
        """Abstract to prevent PlotScript from being created; attributes listed here for every subclass."""
        self.table = None
        self.title = None
        self.x_label_str = None
        self.y_label_str = None
        self.log_y = False
        self.filepath = None

    @abstractmethod
    def render(self):
        """Return the script text."""
        pass

    def _header(self):
        return [
            '"""Generated plot script; run it from the directory holding the table."""',
            'import matplotlib.pyplot as plt',
            'import pandas as pd',
            '',
            f"df = pd.read_csv('{Path(self.table).name}', skiprows=1)",
            '',
            'figure = plt.figure()',
            'axis = figure.gca()',
        ]

    def _style(self):
        """Figure size, spine widths and ticks shared by every project figure."""
        lines = [
            'figure.set_size_inches(11.11, 7.406)',
            'figure.subplots_adjust(bottom=.20)',
            'for spine in axis.spines.values():',
            '    spine.set_linewidth(2)',
            "axis.tick_params(axis='both', which='major', size=8, width=2, labelsize=15)",
        ]
        if self.log_y:
            lines.append("axis.set_yscale('log')")
        return lines

    def _labels(self):
        lines = [
            f'axis.set_xlabel({self.x_label_str!r}, fontsize=20)',
            f'axis.set_ylabel({self.y_label_str!r}, fontsize=20)',
            'axis.legend(fontsize=12)',
        ]
        if self.title:
            lines.append(f'axis.set_title({self.title!r}, fontsize=24, y=1.02)')
        return lines

    def _save(self):
        png = Path(self.table).with_suffix('.png').name
        return [f"figure.savefig('{png}', dpi=150)", 'plt.close(figure)']

    def _assemble(self, body):
        return '\n'.join(self._header() + self._style() + body + self._labels() + self._save()) + '\n'

    def write(self, filepath=None):
        """
        Write the script next to its table unless a filepath is given.

        :param Path filepath: destination, plot_<table stem>.py by default
        :return Path:
        """
        self.filepath = Path(filepath) if filepath else Path(self.table).with_name(f'plot_{Path(self.table).stem}.py')
        self.filepath.write_text(self.render())
        return self.filepath


class EnergyPlotScript(PlotScript):
    """E_r, E_r* and the physical energy against time."""

    def __init__(self, table, columns=('Er', 'Erstar', 'Ephys'), title=None):
        """
        :param Path table: energy CSV
        :param Sequence[str] columns: energy columns to draw
        :param str title: optional title
        """
        super().__init__()
        self.table = table
        self.columns = list(columns)
        self.title = title
        self.x_label_str = 't'
        self.y_label_str = 'energy'

    def render(self):
        body = [f"axis.plot(df['t'], df[{c!r}], '-o', label={c!r})" for c in self.columns]
        return self._assemble(body)


class SweepPlotScript(PlotScript):
    """Differences to the incompressible run against kappa on log-log axes."""

    def __init__(self, table, title=None):
        super().__init__()
        self.table = table
        self.title = title
        self.x_label_str = 'kappa'
        self.y_label_str = 'sup_t difference'
        self.log_y = True

    def render(self):
        body = ["finite = df[df['kappa'] < float('inf')]",
                "axis.set_xscale('log')"]
        body += [f"axis.plot(finite['kappa'], finite[{c!r}], '-o', label={c!r})" for c in ('dv', 'dh', 'dx')]
        return self._assemble(body)


class TracePlotScript(PlotScript):
    """Summed iterate differences and contraction ratios of the data construction."""

    def __init__(self, table, title=None):
        super().__init__()
        self.table = table
        self.title = title
        self.x_label_str = 'iteration'
        self.y_label_str = 'M*, ratio'
        self.log_y = True

    def render(self):
        body = ["axis.plot(df['nu'], df['Mstar'], '-o', label='Mstar')",
                "axis.plot(df['nu'], df['ratio'], '-s', label='ratio')"]
        return self._assemble(body)


class DiagnosticsPlotScript(PlotScript):
    """Continuity residual and curl norm along a run."""

    def __init__(self, table, title=None):
        super().__init__()
        self.table = table
        self.title = title
        self.x_label_str = 't'
        self.y_label_str = 'norm'
        self.log_y = True

    def render(self):
        body = [f"axis.plot(df['t'], df[{c!r}].abs(), '-o', label={c!r})" for c in ('continuity', 'curl')]
        return self._assemble(body)


_SCRIPTS = {'energy': EnergyPlotScript, 'sweep': SweepPlotScript, 'iteration_trace': TracePlotScript,
            'diagnostics': DiagnosticsPlotScript}


def plot_script_for(table):
    """
    PlotScript matching a table by its file stem, or None for tables without a script.

    :param Path table:
    :return PlotScript | None:
    """
    stem = Path(table).stem
    for prefix, cls in _SCRIPTS.items():
        if stem.startswith(prefix):
            return cls(table)
    return None
