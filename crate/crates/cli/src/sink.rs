use std::io::{self, Write};

use clap::ValueEnum;

use ocslopes::VerificationReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

enum Writer<W: Write> {
    Json(W),
    Csv(Box<csv::Writer<W>>),
}

/// Streams reports and remembers whether all of them passed.
pub struct ReportSink<W: Write> {
    writer: Writer<W>,
    all_passed: bool,
}

impl<W: Write> ReportSink<W> {
    pub fn new(w: W, format: Format) -> io::Result<Self> {
        let writer = match format {
            Format::Json => Writer::Json(w),
            Format::Csv => {
                let mut c = csv::Writer::from_writer(w);
                c.write_record(VerificationReport::CSV_HEADER)?;
                Writer::Csv(Box::new(c))
            }
        };
        Ok(ReportSink { writer, all_passed: true })
    }

    pub fn write(&mut self, report: &VerificationReport) -> io::Result<()> {
        self.all_passed &= report.passed();
        match &mut self.writer {
            Writer::Json(w) => {
                writeln!(w, "{}", report.to_json_line())?;
                w.flush()
            }
            Writer::Csv(c) => {
                c.write_record(report.csv_record())?;
                c.flush()
            }
        }
    }

    pub fn finish(self) -> io::Result<bool> {
        match self.writer {
            Writer::Json(mut w) => w.flush()?,
            Writer::Csv(mut c) => c.flush()?,
        }
        Ok(self.all_passed)
    }
}
