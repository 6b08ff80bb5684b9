//! Fixed-precision decimal rendering of exact values.

use num_bigint::BigUint;

pub const SIGNIFICANT_DIGITS: u32 = 12;

/// `num/den` to 12 significant digits, rounding half to even on the exact value.
pub fn from_ratio(num: u128, den: u128) -> String {
    assert!(den != 0, "zero denominator");
    render(BigUint::from(num), BigUint::from(den))
}

/// The exact binary value of a finite non-negative `x`, rendered like
/// [`from_ratio`].
pub fn from_f64(x: f64) -> String {
    assert!(x.is_finite() && x >= 0.0, "expected a finite non-negative value");
    if x == 0.0 {
        return "0".into();
    }
    let bits = x.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mantissa, exp) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_bits - 1075)
    };
    let (num, den) = if exp >= 0 {
        (BigUint::from(mantissa) << exp as usize, BigUint::from(1u32))
    } else {
        (BigUint::from(mantissa), BigUint::from(1u32) << (-exp) as usize)
    };
    render(num, den)
}

fn render(num: BigUint, den: BigUint) -> String {
    let zero = BigUint::from(0u32);
    if num == zero {
        return "0".into();
    }
    let ten = BigUint::from(10u32);
    // e = floor(log10(num/den))
    let mut e: i64 = 0;
    let mut scaled_num = num.clone();
    let mut scaled_den = den.clone();
    while scaled_num >= &scaled_den * &ten {
        scaled_den *= &ten;
        e += 1;
    }
    while scaled_num < scaled_den {
        scaled_num *= &ten;
        e -= 1;
    }
    // now 1 <= scaled_num/scaled_den < 10
    let scale = ten.pow(SIGNIFICANT_DIGITS - 1);
    let prod = scaled_num * scale;
    let mut q = &prod / &scaled_den;
    let r = prod - &q * &scaled_den;
    let twice = r * 2u32;
    let round_up = match twice.cmp(&scaled_den) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => q.bit(0),
    };
    if round_up {
        q += 1u32;
        if q == ten.pow(SIGNIFICANT_DIGITS) {
            q /= &ten;
            e += 1;
        }
    }
    place_point(&q.to_string(), e)
}

/// Digits `d1 d2 ... d12` meaning `d1.d2... * 10^e`.
fn place_point(digits: &str, e: i64) -> String {
    if !(-7..15).contains(&e) {
        return format!("{}.{}e{}", &digits[..1], &digits[1..], e);
    }
    if e < 0 {
        format!("0.{}{}", "0".repeat((-e - 1) as usize), digits)
    } else {
        let int_len = e as usize + 1;
        if int_len >= digits.len() {
            format!("{}{}", digits, "0".repeat(int_len - digits.len()))
        } else {
            format!("{}.{}", &digits[..int_len], &digits[int_len..])
        }
    }
}
