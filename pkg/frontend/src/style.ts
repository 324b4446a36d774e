/** Pinned rendering style. Rendering is a pure function of (CSV, spec,
 * style), so identical inputs give byte-identical SVG output. */
export interface Style {
  panelWidth: number;
  panelHeight: number;
  margin: { top: number; right: number; bottom: number; left: number };
  palette: string[];
  axisColor: string;
  gridColor: string;
  fontFamily: string;
  fontSize: number;
  strokeWidth: number;
}

export const DEFAULT_STYLE: Style = {
  panelWidth: 360,
  panelHeight: 260,
  margin: { top: 28, right: 16, bottom: 40, left: 52 },
  palette: [
    "#4c72b0",
    "#dd8452",
    "#55a868",
    "#c44e52",
    "#8172b3",
    "#937860",
    "#da8bc3",
    "#8c8c8c",
    "#ccb974",
  ],
  axisColor: "#333333",
  gridColor: "#dddddd",
  fontFamily: "Helvetica, Arial, sans-serif",
  fontSize: 11,
  strokeWidth: 1.5,
};
