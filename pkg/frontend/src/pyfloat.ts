/**
 * Float formatting that matches the server's canonical serializer digit for
 * digit. Both sides print the shortest decimal string that round-trips to
 * the same 64-bit double; the server's formatter then applies CPython-style
 * notation rules, so we re-shape the engine's shortest digits the same way:
 * fixed notation while the decimal point position stays in (-4, 16],
 * exponential otherwise with a signed two-digit exponent.
 */

interface Decomposed {
  negative: boolean;
  /** significant digits, no leading or trailing zeros ("" means zero) */
  digits: string;
  /** value = 0.digits * 10^decpt */
  decpt: number;
}

function decompose(value: number): Decomposed {
  const text = value.toString();
  let s = text;
  let negative = false;
  if (s.startsWith("-")) {
    negative = true;
    s = s.slice(1);
  }
  let mantissa = s;
  let exp = 0;
  const eAt = s.indexOf("e");
  if (eAt >= 0) {
    mantissa = s.slice(0, eAt);
    exp = parseInt(s.slice(eAt + 1), 10);
  }
  const dot = mantissa.indexOf(".");
  const intLen = dot >= 0 ? dot : mantissa.length;
  let digits = dot >= 0 ? mantissa.slice(0, dot) + mantissa.slice(dot + 1) : mantissa;
  let decpt = intLen + exp;
  // strip leading zeros (0.00123 -> digits 123, decpt shifts down)
  let lead = 0;
  while (lead < digits.length && digits[lead] === "0") lead++;
  digits = digits.slice(lead);
  decpt -= lead;
  // trailing zeros are positional, not significant
  digits = digits.replace(/0+$/, "");
  return { negative, digits, decpt };
}

export function pyFloatRepr(value: number): string {
  if (Number.isNaN(value)) return "nan";
  if (value === Infinity) return "inf";
  if (value === -Infinity) return "-inf";
  if (Object.is(value, -0)) return "-0.0"; // (-0).toString() drops the sign
  const { negative, digits, decpt } = decompose(value);
  const sign = negative ? "-" : "";
  if (digits === "") return sign + "0.0";
  let body: string;
  if (decpt <= -4 || decpt > 16) {
    const head = digits[0];
    const rest = digits.slice(1);
    const e = decpt - 1;
    const eAbs = Math.abs(e).toString().padStart(2, "0");
    body = head + (rest ? "." + rest : "") + "e" + (e < 0 ? "-" : "+") + eAbs;
  } else if (decpt <= 0) {
    body = "0." + "0".repeat(-decpt) + digits;
  } else if (decpt >= digits.length) {
    body = digits + "0".repeat(decpt - digits.length) + ".0";
  } else {
    body = digits.slice(0, decpt) + "." + digits.slice(decpt);
  }
  return sign + body;
}
