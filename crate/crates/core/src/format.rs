//! Decimal rendering at a fixed number of significant digits.

/// Round `x` to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    let digits = digits.clamp(1, 17);
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

/// Render `x` with at most `digits` significant digits, dropping trailing
/// zeros. Plain notation is used for decimal exponents in `-5..15`,
/// scientific notation otherwise.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "Inf" } else { "-Inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let digits = digits.clamp(1, 17);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digit_str: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let digit_str = digit_str.trim_end_matches('0');
    let digit_str = if digit_str.is_empty() { "0" } else { digit_str };

    let body = if (-5..15).contains(&exp) {
        if exp >= 0 {
            let int_len = exp as usize + 1;
            if digit_str.len() <= int_len {
                format!("{}{}", digit_str, "0".repeat(int_len - digit_str.len()))
            } else {
                format!("{}.{}", &digit_str[..int_len], &digit_str[int_len..])
            }
        } else {
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), digit_str)
        }
    } else {
        let frac = &digit_str[1..];
        if frac.is_empty() {
            format!("{}e{}", &digit_str[..1], exp)
        } else {
            format!("{}.{}e{}", &digit_str[..1], frac, exp)
        }
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}
