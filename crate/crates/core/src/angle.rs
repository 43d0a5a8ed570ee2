//! Angle literals in radians: plain numbers, `pi`, `x*pi`, `pi/y`, `x*pi/y`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

fn number(s: &str, whole: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|_| Error::InvalidArgument(format!("cannot parse angle '{whole}'")))?;
    if !v.is_finite() {
        return Err(Error::InvalidArgument(format!("angle '{whole}' is not finite")));
    }
    Ok(v)
}

pub fn parse_angle(text: &str) -> Result<f64> {
    let s = text.trim().to_ascii_lowercase();
    if s.is_empty() {
        return Err(Error::InvalidArgument("empty angle".into()));
    }
    let Some(pos) = s.find("pi") else {
        return number(&s, text);
    };
    let (head, tail) = (s[..pos].trim(), s[pos + 2..].trim());
    let factor = match head {
        "" => 1.0,
        "-" => -1.0,
        h => match h.strip_suffix('*') {
            Some(x) => number(x, text)?,
            None => return Err(Error::InvalidArgument(format!("cannot parse angle '{text}'"))),
        },
    };
    let divisor = match tail {
        "" => 1.0,
        t => match t.strip_prefix('/') {
            Some(y) => number(y, text)?,
            None => return Err(Error::InvalidArgument(format!("cannot parse angle '{text}'"))),
        },
    };
    if divisor == 0.0 {
        return Err(Error::InvalidArgument(format!("angle '{text}' divides by zero")));
    }
    Ok(factor * PI / divisor)
}

/// Grid syntax `start:stop:count` (inclusive, evenly spaced) or a comma list.
pub fn parse_angle_grid(text: &str) -> Result<Vec<f64>> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::InvalidArgument("empty angle grid".into()));
    }
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidArgument(format!("grid '{s}' is not start:stop:count")));
        }
        let (a, b) = (parse_angle(parts[0])?, parse_angle(parts[1])?);
        let n: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad grid count in '{s}'")))?;
        return match n {
            0 => Err(Error::InvalidArgument("empty angle grid".into())),
            1 => Ok(vec![a]),
            _ => Ok((0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect()),
        };
    }
    s.split(',').map(parse_angle).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("PI").unwrap(), PI);
        assert_eq!(parse_angle("0.5").unwrap(), 0.5);
        assert_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("3*pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("-pi").unwrap(), -PI);
        assert_eq!(parse_angle("0.25*pi").unwrap(), 0.25 * PI);
        for bad in ["", "pie", "2pi", "pi/0", "pi*2", "abc", "nan", "inf"] {
            assert!(parse_angle(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn grids() {
        let g = parse_angle_grid("0:pi:5").unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g[4], PI);
        assert_eq!(g[2], PI / 2.0);
        assert_eq!(parse_angle_grid("pi,1").unwrap(), vec![PI, 1.0]);
        assert!(parse_angle_grid("0:pi:0").is_err());
        assert!(parse_angle_grid("").is_err());
        assert!(parse_angle_grid("0:1").is_err());
    }
}
