# Independent high-precision values for reference.json (mpmath, 30 digits).
# Run: python3 oracle.py
from mpmath import mp, mpf, sech, tanh, atanh, sqrt, quad, inf
mp.dps = 30
def prof(om, g, p):
    A = (p+1)*om/2; c = (p-1)*sqrt(om)/sqrt(2); a = atanh(g/sqrt(2*om))
    Q = lambda x: (A*sech(c*x+a)**2)**(1/mpf(p-1))
    dQ = lambda x: Q(x)*(-2*c/(p-1))*tanh(c*x+a)
    return Q, dQ
def funcs(om, g, p):
    Q, dQ = prof(om, g, p)
    m2 = 2*quad(lambda x: Q(x)**2, [0, 1, 5, inf])
    d2 = 2*quad(lambda x: dQ(x)**2, [0, 1, 5, inf])
    lp = 2*quad(lambda x: Q(x)**(p+1), [0, 1, 5, inf])
    q0 = Q(0)**2
    S = d2/4 - g/2*q0 + om/2*m2 - lp/(p+1)
    E = d2/4 - g/2*q0 - lp/(p+1)
    P = d2/2 - g/2*q0 - (p-1)/mpf(2*(p+1))*lp
    I = d2/2 - g*q0 + om*m2 - lp
    return dict(m2=m2, d2=d2, lp=lp, S=S, E=E, M=m2/2, P=P, I=I)
p = 7
f = funcs(1, 0, p)
for k, v in f.items(): print('Q10', k, mp.nstr(v, 20))
sig = mpf(p+3)/(p-5)
print('E0 M^sigma', mp.nstr(f['E']*f['M']**sig, 20))
print('(a S)^(2(p-1)/(p-5))', mp.nstr((mpf(p+3)/(2*(p-1))*f['S'])**(mpf(2*(p-1))/(p-5)), 20))
for om in [0.25, 1, 4]:
    for g in [0, -0.5, -1]:
        if om > g*g/2:
            ff = funcs(om, g, p)
            print('om', om, 'g', g, 'S', mp.nstr(ff['S'], 20), 'P', mp.nstr(ff['P'], 5), 'I', mp.nstr(ff['I'], 5))
        else:
            print('om', om, 'g', g, 'no delta soliton')
