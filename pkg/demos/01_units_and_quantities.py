"""
Units and quantities
====================

Parse unit strings, check dimensional compatibility, and do arithmetic
with magnitudes that carry their units along.
"""

from unitpack import Quantity, conversion_factor, parse_quantity, parse_unit

# Unit expressions use a compact astropy-style notation: products with
# `*`, quotients with `/`, integer exponents with `^`.
mv = parse_unit("mV")
volt = parse_unit("V")
print("mV relative to V:", conversion_factor(mv, volt))   # exact 1/1000

# A compound expression reduces to the same dimension vector as the
# named unit it spells out.
compound = parse_unit("kg*m^2/s^3/A")
print("kg*m^2/s^3/A == V ?", compound == volt)
print("canonical form:", compound.canonical_text)

# Quantities combine magnitudes with units. Dividing a voltage by a
# current yields a resistance:
voltage = Quantity(1.0, mv)
current = parse_quantity("5 mA")
resistance = (voltage / current).to("Ohm")
print("1.0 mV / 5 mA =", resistance)

# Conversions are exact rational rescalings; incompatible dimensions
# raise rather than silently producing nonsense.
print("0.001 V in mV:", Quantity(0.001, volt).to("mV").magnitude)
try:
    Quantity(1.0, mv).to("K")
except Exception as exc:
    print("mV -> K rejected:", exc)
