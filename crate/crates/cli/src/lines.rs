//! ASCII 0/1 bundle files: one bundle per line, LF-terminated.

use compaction_forge::Error;

pub fn parse(text: &str) -> Result<Vec<Vec<bool>>, Error> {
    text.lines()
        .enumerate()
        .map(|(i, l)| {
            l.trim_end_matches('\r')
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(Error::Parse {
                        line: i + 1,
                        msg: format!("unexpected character {c:?}; lines hold 0 and 1 only"),
                    }),
                })
                .collect()
        })
        .collect()
}

pub fn render(bundles: &[Vec<bool>]) -> String {
    let mut s = String::new();
    for b in bundles {
        s.extend(b.iter().map(|&x| if x { '1' } else { '0' }));
        s.push('\n');
    }
    s
}
