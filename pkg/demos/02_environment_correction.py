"""Correcting raw currents for temperature and humidity.

Each raw value gets the humidity-driven temperature correction first, then
the temperature-driven humidity correction. At 0 %RH and 0 degC both offsets
vanish and only the two 0.148 gains remain.
"""

from chronoinfer import CorrectionCoeffs, EnvironmentReading, correct

raw = 1e-7

for env in (EnvironmentReading(0.0, 0.0), EnvironmentReading(25.0, 50.0),
            EnvironmentReading(35.0, 80.0)):
    print(f"T={env.k_temp:5.1f} C  RH={env.k_rh:5.1f} %  ->  {correct(raw, env):.6e} A")

print("gain-only ratio at reference:", correct(raw, EnvironmentReading(0, 0)) / raw)

# %% The typeset exponent is ambiguous; the alternative parse is one flag away.
alt = CorrectionCoeffs(parse="product")
print("product parse at 25 C / 50 %RH:", correct(raw, EnvironmentReading(25.0, 50.0), alt))
