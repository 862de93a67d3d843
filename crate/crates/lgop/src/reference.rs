//! Published absolute-error tables, transcribed cell by cell.

/// X grid shared by every block.
pub const X_GRID: [f64; 5] = [0.0, 0.5, 1.0, 1.5, 2.0];
pub const ETA_GRID: [f64; 4] = [25.0, 50.0, 75.0, 100.0];

#[derive(Debug, Clone, Copy)]
pub struct ReferenceBlock {
    pub alpha: f64,
    pub beta: f64,
    /// `values[i][j]` at `X_GRID[i]`, `ETA_GRID[j]`.
    pub values: [[f64; 4]; 5],
}

#[derive(Debug, Clone, Copy)]
pub struct ReferenceTable {
    pub name: &'static str,
    pub function: &'static str,
    pub blocks: [ReferenceBlock; 2],
}

pub const TABLE1: ReferenceTable = ReferenceTable {
    name: "table1",
    function: "xexp5",
    blocks: [
        ReferenceBlock {
            alpha: 1.0,
            beta: 0.98,
            values: [
                [0.034901800, 0.025423800, 0.019518100, 0.015763700],
                [0.003740950, 0.001533680, 0.000898391, 0.000617602],
                [0.004815770, 0.002722240, 0.001880080, 0.001433030],
                [0.002000540, 0.000915633, 0.000583079, 0.000425828],
                [0.000534200, 0.000197393, 0.000115992, 0.000081252],
            ],
        },
        ReferenceBlock {
            alpha: 5.0,
            beta: 10.0,
            values: [
                [0.060720100, 0.057087900, 0.048077200, 0.040729100],
                [0.016013200, 0.009493930, 0.006739870, 0.005223240],
                [0.000626519, 0.000237580, 0.000133640, 0.000089514],
                [0.000436015, 0.000248134, 0.000171949, 0.000131331],
                [0.000150698, 0.000071107, 0.000045981, 0.000033881],
            ],
        },
    ],
};

pub const TABLE2: ReferenceTable = ReferenceTable {
    name: "table2",
    function: "cubic",
    blocks: [
        ReferenceBlock {
            alpha: 2.0,
            beta: 0.5,
            values: [
                [0.06316800, 0.01869600, 0.00873956, 0.00503700],
                [0.10636800, 0.08449600, 0.06242840, 0.04898700],
                [0.45043200, 0.14970400, 0.08388270, 0.05706300],
                [1.60723000, 0.68390400, 0.43019400, 0.31311300],
                [3.36403000, 1.51810000, 0.97650500, 0.71916300],
            ],
        },
        ReferenceBlock {
            alpha: 0.5,
            beta: 2.0,
            values: [
                [0.01876800, 0.00504600, 0.00229511, 0.00130575],
                [0.08416800, 0.05014600, 0.03511730, 0.02695580],
                [0.18043200, 0.06975400, 0.04206040, 0.02989420],
                [0.77503200, 0.35465400, 0.22923800, 0.16924400],
                [1.69963000, 0.80455400, 0.52641600, 0.39109400],
            ],
        },
    ],
};

impl ReferenceBlock {
    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.values.iter().map(|r| r.to_vec()).collect()
    }
}
