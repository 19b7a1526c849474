use std::io::{self, Write};

use cqubit::dsl::format_float;
use cqubit::state::ChannelQuadWave;

pub const CSV_HEADER: &str = "t,in_c0re,in_c0im,in_c1re,in_c1im,out_c0re,out_c0im,out_c1re,out_c1im";

/// One row per sample: time in seconds, then the four input and four output
/// channels. Floats use the shortest round-trip form; lines end in LF.
pub fn write_csv(w: &mut dyn Write, input: &ChannelQuadWave, output: &ChannelQuadWave) -> io::Result<()> {
    assert_eq!(input.len(), output.len(), "input and output grids differ");
    writeln!(w, "{CSV_HEADER}")?;
    let mut row = String::new();
    for (k, (i, o)) in input.samples().zip(output.samples()).enumerate() {
        row.clear();
        row.push_str(&format_float(input.time(k)));
        for v in i.to_array().into_iter().chain(o.to_array()) {
            row.push(',');
            // fold -0 into 0
            row.push_str(&format_float(v + 0.0));
        }
        row.push('\n');
        w.write_all(row.as_bytes())?;
    }
    Ok(())
}
