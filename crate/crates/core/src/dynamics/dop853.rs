//! Explicit Runge-Kutta pair of order 8(5,3) with 7th-order dense output and
//! event location, generic over a fixed-size state.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Steps smaller than this abort the integration.
    pub min_step: f64,
    pub initial_step: Option<f64>,
    pub max_steps: usize,
    /// Root tolerance for event location, in the independent variable.
    pub event_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            max_step: f64::INFINITY,
            min_step: 1e-15,
            initial_step: None,
            max_steps: 1_000_000,
            event_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Rising,
    Falling,
    Either,
}

impl Direction {
    fn admits(self, g0: f64, g1: f64) -> bool {
        let rising = g0 < 0.0 && g1 >= 0.0;
        let falling = g0 > 0.0 && g1 <= 0.0;
        match self {
            Direction::Rising => rising,
            Direction::Falling => falling,
            Direction::Either => rising || falling,
        }
    }
}

pub type EventClosure<'a, const N: usize> = Box<dyn Fn(f64, &[f64; N]) -> f64 + Send + Sync + 'a>;

pub enum EventKind<'a, const N: usize> {
    /// `g(y) = weights·y + offset`; refined by one Newton step after bracketing.
    Linear { weights: [f64; N], offset: f64 },
    Custom(EventClosure<'a, N>),
}

pub struct EventSpec<'a, const N: usize> {
    pub name: String,
    pub kind: EventKind<'a, N>,
    pub direction: Direction,
    /// Roots are only reported strictly inside this interval.
    pub window: (f64, f64),
    pub terminal: bool,
}

impl<'a, const N: usize> EventSpec<'a, N> {
    pub fn linear(name: &str, weights: [f64; N], offset: f64) -> Self {
        Self {
            name: name.to_string(),
            kind: EventKind::Linear { weights, offset },
            direction: Direction::Either,
            window: (f64::NEG_INFINITY, f64::INFINITY),
            terminal: false,
        }
    }

    pub fn custom(name: &str, f: impl Fn(f64, &[f64; N]) -> f64 + Send + Sync + 'a) -> Self {
        Self {
            name: name.to_string(),
            kind: EventKind::Custom(Box::new(f)),
            direction: Direction::Either,
            window: (f64::NEG_INFINITY, f64::INFINITY),
            terminal: false,
        }
    }

    pub fn direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn window(mut self, lo: f64, hi: f64) -> Self {
        self.window = (lo, hi);
        self
    }

    pub fn terminal(mut self, terminal: bool) -> Self {
        self.terminal = terminal;
        self
    }

    fn eval(&self, s: f64, y: &[f64; N]) -> f64 {
        match &self.kind {
            EventKind::Linear { weights, offset } => {
                weights.iter().zip(y).map(|(w, x)| w * x).sum::<f64>() + offset
            }
            EventKind::Custom(f) => f(s, y),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventHit<const N: usize> {
    pub index: usize,
    pub name: String,
    pub s: f64,
    pub y: [f64; N],
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub steps: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverFailure<E> {
    #[error("step size {h:e} fell below the minimum at s = {s}")]
    StepUnderflow { s: f64, h: f64 },
    #[error("maximum number of steps reached at s = {s}")]
    MaxSteps { s: f64 },
    #[error("right-hand side failed at s = {s}: {source}")]
    Rhs { s: f64, source: E },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Termination<E> {
    Completed,
    Event(usize),
    Failed(SolverFailure<E>),
}

/// One accepted step's interpolant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseSegment<const N: usize> {
    pub s0: f64,
    pub h: f64,
    cont: [[f64; N]; 8],
}

impl<const N: usize> DenseSegment<N> {
    pub fn end(&self) -> f64 {
        self.s0 + self.h
    }

    pub fn eval(&self, s: f64) -> [f64; N] {
        let th = (s - self.s0) / self.h;
        let th1 = 1.0 - th;
        let c = &self.cont;
        let mut out = [0.0; N];
        for i in 0..N {
            let par = c[4][i] + th * (c[5][i] + th1 * (c[6][i] + th * c[7][i]));
            out[i] = c[0][i] + th * (c[1][i] + th1 * (c[2][i] + th * (c[3][i] + th1 * par)));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct Solution<const N: usize, E> {
    /// Accepted step endpoints, starting with the initial point.
    pub s: Vec<f64>,
    pub y: Vec<[f64; N]>,
    pub segments: Vec<DenseSegment<N>>,
    pub events: Vec<EventHit<N>>,
    pub stats: Stats,
    pub termination: Termination<E>,
}

impl<const N: usize, E> Solution<N, E> {
    pub fn s_end(&self) -> f64 {
        *self.s.last().expect("solution always holds the initial point")
    }

    pub fn y_end(&self) -> [f64; N] {
        *self.y.last().expect("solution always holds the initial point")
    }

    /// Dense-output state at `s`, or `None` outside the integrated span.
    pub fn eval(&self, s: f64) -> Option<[f64; N]> {
        let (s0, s1) = (self.s[0], self.s_end());
        let (lo, hi) = if s0 <= s1 { (s0, s1) } else { (s1, s0) };
        if !(s >= lo && s <= hi) {
            return None;
        }
        if self.segments.is_empty() {
            return Some(self.y[0]);
        }
        let forward = self.segments[0].h > 0.0;
        let idx = self.segments.partition_point(|seg| {
            if forward {
                seg.end() < s
            } else {
                seg.end() > s
            }
        });
        let seg = &self.segments[idx.min(self.segments.len() - 1)];
        Some(seg.eval(s))
    }

    pub fn succeeded(&self) -> bool {
        !matches!(self.termination, Termination::Failed(_))
    }
}

// Butcher tableau, error estimators and dense-output coefficients.
const C2: f64 = 0.526001519587677318785587544488E-01;
const C3: f64 = 0.789002279381515978178381316732E-01;
const C4: f64 = 0.118350341907227396726757197510E+00;
const C5: f64 = 0.281649658092772603273242802490E+00;
const C6: f64 = 0.333333333333333333333333333333E+00;
const C7: f64 = 0.25E+00;
const C8: f64 = 0.307692307692307692307692307692E+00;
const C9: f64 = 0.651282051282051282051282051282E+00;
const C10: f64 = 0.6E+00;
const C11: f64 = 0.857142857142857142857142857142E+00;
const C14: f64 = 0.1E+00;
const C15: f64 = 0.2E+00;
const C16: f64 = 0.777777777777777777777777777778E+00;

const A21: f64 = 5.26001519587677318785587544488E-2;
const A31: f64 = 1.97250569845378994544595329183E-2;
const A32: f64 = 5.91751709536136983633785987549E-2;
const A41: f64 = 2.95875854768068491816892993775E-2;
const A43: f64 = 8.87627564304205475450678981324E-2;
const A51: f64 = 2.41365134159266685502369798665E-1;
const A53: f64 = -8.84549479328286085344864962717E-1;
const A54: f64 = 9.24834003261792003115737966543E-1;
const A61: f64 = 3.7037037037037037037037037037E-2;
const A64: f64 = 1.70828608729473871279604482173E-1;
const A65: f64 = 1.25467687566822425016691814123E-1;
const A71: f64 = 3.7109375E-2;
const A74: f64 = 1.70252211019544039314978060272E-1;
const A75: f64 = 6.02165389804559606850219397283E-2;
const A76: f64 = -1.7578125E-2;
const A81: f64 = 3.70920001185047927108779319836E-2;
const A84: f64 = 1.70383925712239993810214054705E-1;
const A85: f64 = 1.07262030446373284651809199168E-1;
const A86: f64 = -1.53194377486244017527936158236E-2;
const A87: f64 = 8.27378916381402288758473766002E-3;
const A91: f64 = 6.24110958716075717114429577812E-1;
const A94: f64 = -3.36089262944694129406857109825E0;
const A95: f64 = -8.68219346841726006818189891453E-1;
const A96: f64 = 2.75920996994467083049415600797E1;
const A97: f64 = 2.01540675504778934086186788979E1;
const A98: f64 = -4.34898841810699588477366255144E1;
const A101: f64 = 4.77662536438264365890433908527E-1;
const A104: f64 = -2.48811461997166764192642586468E0;
const A105: f64 = -5.90290826836842996371446475743E-1;
const A106: f64 = 2.12300514481811942347288949897E1;
const A107: f64 = 1.52792336328824235832596922938E1;
const A108: f64 = -3.32882109689848629194453265587E1;
const A109: f64 = -2.03312017085086261358222928593E-2;
const A111: f64 = -9.3714243008598732571704021658E-1;
const A114: f64 = 5.18637242884406370830023853209E0;
const A115: f64 = 1.09143734899672957818500254654E0;
const A116: f64 = -8.14978701074692612513997267357E0;
const A117: f64 = -1.85200656599969598641566180701E1;
const A118: f64 = 2.27394870993505042818970056734E1;
const A119: f64 = 2.49360555267965238987089396762E0;
const A1110: f64 = -3.0467644718982195003823669022E0;
const A121: f64 = 2.27331014751653820792359768449E0;
const A124: f64 = -1.05344954667372501984066689879E1;
const A125: f64 = -2.00087205822486249909675718444E0;
const A126: f64 = -1.79589318631187989172765950534E1;
const A127: f64 = 2.79488845294199600508499808837E1;
const A128: f64 = -2.85899827713502369474065508674E0;
const A129: f64 = -8.87285693353062954433549289258E0;
const A1210: f64 = 1.23605671757943030647266201528E1;
const A1211: f64 = 6.43392746015763530355970484046E-1;
const A141: f64 = 5.61675022830479523392909219681E-2;
const A147: f64 = 2.53500210216624811088794765333E-1;
const A148: f64 = -2.46239037470802489917441475441E-1;
const A149: f64 = -1.24191423263816360469010140626E-1;
const A1410: f64 = 1.5329179827876569731206322685E-1;
const A1411: f64 = 8.20105229563468988491666602057E-3;
const A1412: f64 = 7.56789766054569976138603589584E-3;
const A1413: f64 = -8.298E-3;
const A151: f64 = 3.18346481635021405060768473261E-2;
const A156: f64 = 2.83009096723667755288322961402E-2;
const A157: f64 = 5.35419883074385676223797384372E-2;
const A158: f64 = -5.49237485713909884646569340306E-2;
const A1511: f64 = -1.08347328697249322858509316994E-4;
const A1512: f64 = 3.82571090835658412954920192323E-4;
const A1513: f64 = -3.40465008687404560802977114492E-4;
const A1514: f64 = 1.41312443674632500278074618366E-1;
const A161: f64 = -4.28896301583791923408573538692E-1;
const A166: f64 = -4.69762141536116384314449447206E0;
const A167: f64 = 7.68342119606259904184240953878E0;
const A168: f64 = 4.06898981839711007970213554331E0;
const A169: f64 = 3.56727187455281109270669543021E-1;
const A1613: f64 = -1.39902416515901462129418009734E-3;
const A1614: f64 = 2.9475147891527723389556272149E0;
const A1615: f64 = -9.15095847217987001081870187138E0;

const B1: f64 = 5.42937341165687622380535766363E-2;
const B6: f64 = 4.45031289275240888144113950566E0;
const B7: f64 = 1.89151789931450038304281599044E0;
const B8: f64 = -5.8012039600105847814672114227E0;
const B9: f64 = 3.1116436695781989440891606237E-1;
const B10: f64 = -1.52160949662516078556178806805E-1;
const B11: f64 = 2.01365400804030348374776537501E-1;
const B12: f64 = 4.47106157277725905176885569043E-2;

const BHH1: f64 = 0.244094488188976377952755905512E+00;
const BHH2: f64 = 0.733846688281611857341361741547E+00;
const BHH3: f64 = 0.220588235294117647058823529412E-01;

const ER1: f64 = 0.1312004499419488073250102996E-01;
const ER6: f64 = -0.1225156446376204440720569753E+01;
const ER7: f64 = -0.4957589496572501915214079952E+00;
const ER8: f64 = 0.1664377182454986536961530415E+01;
const ER9: f64 = -0.3503288487499736816886487290E+00;
const ER10: f64 = 0.3341791187130174790297318841E+00;
const ER11: f64 = 0.8192320648511571246570742613E-01;
const ER12: f64 = -0.2235530786388629525884427845E-01;

const D4: [f64; 12] = [
    -0.84289382761090128651353491142E+01,
    0.56671495351937776962531783590E+00,
    -0.30689499459498916912797304727E+01,
    0.23846676565120698287728149680E+01,
    0.21170345824450282767155149946E+01,
    -0.87139158377797299206789907490E+00,
    0.22404374302607882758541771650E+01,
    0.63157877876946881815570249290E+00,
    -0.88990336451333310820698117400E-01,
    0.18148505520854727256656404962E+02,
    -0.91946323924783554000451984436E+01,
    -0.44360363875948939664310572000E+01,
];
const D5: [f64; 12] = [
    0.10427508642579134603413151009E+02,
    0.24228349177525818288430175319E+03,
    0.16520045171727028198505394887E+03,
    -0.37454675472269020279518312152E+03,
    -0.22113666853125306036270938578E+02,
    0.77334326684722638389603898808E+01,
    -0.30674084731089398182061213626E+02,
    -0.93321305264302278729567221706E+01,
    0.15697238121770843886131091075E+02,
    -0.31139403219565177677282850411E+02,
    -0.93529243588444783865713862664E+01,
    0.35816841486394083752465898540E+02,
];
const D6: [f64; 12] = [
    0.19985053242002433820987653617E+02,
    -0.38703730874935176555105901742E+03,
    -0.18917813819516756882830838328E+03,
    0.52780815920542364900561016686E+03,
    -0.11573902539959630126141871134E+02,
    0.68812326946963000169666922661E+01,
    -0.10006050966910838403183860980E+01,
    0.77771377980534432092869265740E+00,
    -0.27782057523535084065932004339E+01,
    -0.60196695231264120758267380846E+02,
    0.84320405506677161018159903784E+02,
    0.11992291136182789328035130030E+02,
];
const D7: [f64; 12] = [
    -0.25693933462703749003312586129E+02,
    -0.15418974869023643374053993627E+03,
    -0.23152937917604549567536039109E+03,
    0.35763911791061412378285349910E+03,
    0.93405324183624310003907691704E+02,
    -0.37458323136451633156875139351E+02,
    0.10409964950896230045147246184E+03,
    0.29840293426660503123344363579E+02,
    -0.43533456590011143754432175058E+02,
    0.96324553959188282948394950600E+02,
    -0.39177261675615439165231486172E+02,
    -0.14972683625798562581422125276E+03,
];

const SAFE: f64 = 0.9;
const FAC_MIN: f64 = 0.333;
const FAC_MAX: f64 = 6.0;
const BETA: f64 = 0.04;

/// `y + h·Σ aⱼ·kⱼ`.
#[inline]
fn combo<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut acc = 0.0;
        for (a, k) in terms {
            acc += a * k[i];
        }
        out[i] += h * acc;
    }
    out
}

struct Rhs<F> {
    f: F,
    evals: usize,
}

impl<F> Rhs<F> {
    fn call<const N: usize, E>(&mut self, s: f64, y: &[f64; N]) -> Result<[f64; N], SolverFailure<E>>
    where
        F: FnMut(f64, &[f64; N]) -> Result<[f64; N], E>,
    {
        self.evals += 1;
        (self.f)(s, y).map_err(|source| SolverFailure::Rhs { s, source })
    }
}

fn initial_step<const N: usize, E, F>(
    rhs: &mut Rhs<F>,
    s0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    dir: f64,
    opts: &SolverOptions,
) -> Result<f64, SolverFailure<E>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N], E>,
{
    let sk = |i: usize| opts.abs_tol + opts.rel_tol * y0[i].abs();
    let mut dnf = 0.0;
    let mut dny = 0.0;
    for i in 0..N {
        dnf += (f0[i] / sk(i)).powi(2);
        dny += (y0[i] / sk(i)).powi(2);
    }
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
        1e-6
    } else {
        0.01 * (dny / dnf).sqrt()
    };
    h = h.min(opts.max_step);
    let y1 = combo(y0, dir * h, &[(1.0, f0)]);
    let f1 = rhs.call(s0 + dir * h, &y1)?;
    let mut der2 = 0.0;
    for i in 0..N {
        der2 += ((f1[i] - f0[i]) / sk(i)).powi(2);
    }
    let der2 = der2.sqrt() / h;
    let der12 = der2.max(dnf.sqrt());
    let h1 = if der12 <= 1e-15 {
        (1e-6f64).max(h * 1e-3)
    } else {
        (0.01 / der12).powf(1.0 / 8.0)
    };
    Ok((100.0 * h).min(h1).min(opts.max_step))
}

/// Illinois-safeguarded regula falsi on a sign-changing bracket.
fn locate_root(mut a: f64, mut ga: f64, mut b: f64, mut gb: f64, tol: f64, g: impl Fn(f64) -> f64) -> f64 {
    let mut side = 0i8;
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        let mut m = (a * gb - b * ga) / (gb - ga);
        let span = b - a;
        // Keep the trial point well inside the bracket.
        if !m.is_finite() || (m - a) / span < 0.01 || (b - m) / span < 0.01 {
            m = 0.5 * (a + b);
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if (gm < 0.0) == (ga < 0.0) {
            a = m;
            ga = gm;
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        } else {
            b = m;
            gb = gm;
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        }
    }
    if ga.abs() < gb.abs() {
        a
    } else {
        b
    }
}

struct Located<const N: usize> {
    index: usize,
    s: f64,
    y: [f64; N],
}

/// Integrates `y' = f(s, y)` from `s0` to `s_end` (either direction).
pub fn solve<const N: usize, E, F>(
    f: F,
    s0: f64,
    y0: [f64; N],
    s_end: f64,
    opts: &SolverOptions,
    events: &[EventSpec<'_, N>],
) -> Solution<N, E>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N], E>,
{
    let mut sol = Solution {
        s: vec![s0],
        y: vec![y0],
        segments: Vec::new(),
        events: Vec::new(),
        stats: Stats::default(),
        termination: Termination::Completed,
    };
    let mut rhs = Rhs { f, evals: 0 };
    let result = run(&mut rhs, s0, y0, s_end, opts, events, &mut sol);
    sol.stats.rhs_evals = rhs.evals;
    sol.termination = match result {
        Ok(Some(idx)) => Termination::Event(idx),
        Ok(None) => Termination::Completed,
        Err(e) => Termination::Failed(e),
    };
    sol
}

fn run<const N: usize, E, F>(
    rhs: &mut Rhs<F>,
    s0: f64,
    y0: [f64; N],
    s_end: f64,
    opts: &SolverOptions,
    events: &[EventSpec<'_, N>],
    sol: &mut Solution<N, E>,
) -> Result<Option<usize>, SolverFailure<E>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N], E>,
{
    if s_end == s0 {
        return Ok(None);
    }
    let dir = if s_end > s0 { 1.0 } else { -1.0 };
    let expo1 = 1.0 / 8.0 - BETA * 0.2;
    let mut fac_old = 1e-4f64;

    let mut s = s0;
    let mut y = y0;
    let mut k1 = rhs.call(s, &y)?;
    let mut h = match opts.initial_step {
        Some(h) => h.abs().min(opts.max_step),
        None => initial_step(rhs, s, &y, &k1, dir, opts)?,
    };
    let mut last_rejected = false;
    let mut g_prev: Vec<f64> = events.iter().map(|ev| ev.eval(s, &y)).collect();

    loop {
        if sol.stats.steps + sol.stats.rejected >= opts.max_steps {
            return Err(SolverFailure::MaxSteps { s });
        }
        if h < opts.min_step {
            return Err(SolverFailure::StepUnderflow { s, h });
        }
        let last = (s + dir * 1.01 * h - s_end) * dir >= 0.0;
        if last {
            h = (s_end - s).abs();
        }
        let hs = dir * h;

        let k2 = rhs.call(s + C2 * hs, &combo(&y, hs, &[(A21, &k1)]))?;
        let k3 = rhs.call(s + C3 * hs, &combo(&y, hs, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = rhs.call(s + C4 * hs, &combo(&y, hs, &[(A41, &k1), (A43, &k3)]))?;
        let k5 = rhs.call(
            s + C5 * hs,
            &combo(&y, hs, &[(A51, &k1), (A53, &k3), (A54, &k4)]),
        )?;
        let k6 = rhs.call(
            s + C6 * hs,
            &combo(&y, hs, &[(A61, &k1), (A64, &k4), (A65, &k5)]),
        )?;
        let k7 = rhs.call(
            s + C7 * hs,
            &combo(&y, hs, &[(A71, &k1), (A74, &k4), (A75, &k5), (A76, &k6)]),
        )?;
        let k8 = rhs.call(
            s + C8 * hs,
            &combo(
                &y,
                hs,
                &[(A81, &k1), (A84, &k4), (A85, &k5), (A86, &k6), (A87, &k7)],
            ),
        )?;
        let k9 = rhs.call(
            s + C9 * hs,
            &combo(
                &y,
                hs,
                &[
                    (A91, &k1),
                    (A94, &k4),
                    (A95, &k5),
                    (A96, &k6),
                    (A97, &k7),
                    (A98, &k8),
                ],
            ),
        )?;
        let k10 = rhs.call(
            s + C10 * hs,
            &combo(
                &y,
                hs,
                &[
                    (A101, &k1),
                    (A104, &k4),
                    (A105, &k5),
                    (A106, &k6),
                    (A107, &k7),
                    (A108, &k8),
                    (A109, &k9),
                ],
            ),
        )?;
        let k11 = rhs.call(
            s + C11 * hs,
            &combo(
                &y,
                hs,
                &[
                    (A111, &k1),
                    (A114, &k4),
                    (A115, &k5),
                    (A116, &k6),
                    (A117, &k7),
                    (A118, &k8),
                    (A119, &k9),
                    (A1110, &k10),
                ],
            ),
        )?;
        let s_new = s + hs;
        let k12 = rhs.call(
            s_new,
            &combo(
                &y,
                hs,
                &[
                    (A121, &k1),
                    (A124, &k4),
                    (A125, &k5),
                    (A126, &k6),
                    (A127, &k7),
                    (A128, &k8),
                    (A129, &k9),
                    (A1210, &k10),
                    (A1211, &k11),
                ],
            ),
        )?;
        let bsum_terms = [
            (B1, &k1),
            (B6, &k6),
            (B7, &k7),
            (B8, &k8),
            (B9, &k9),
            (B10, &k10),
            (B11, &k11),
            (B12, &k12),
        ];
        let y_new = combo(&y, hs, &bsum_terms);

        let mut err = 0.0;
        let mut err2 = 0.0;
        for i in 0..N {
            let sk = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
            let bsum: f64 = bsum_terms.iter().map(|(b, k)| b * k[i]).sum();
            let e3 = bsum - BHH1 * k1[i] - BHH2 * k9[i] - BHH3 * k12[i];
            err2 += (e3 / sk).powi(2);
            let e5 = ER1 * k1[i]
                + ER6 * k6[i]
                + ER7 * k7[i]
                + ER8 * k8[i]
                + ER9 * k9[i]
                + ER10 * k10[i]
                + ER11 * k11[i]
                + ER12 * k12[i];
            err += (e5 / sk).powi(2);
        }
        let mut deno = err + 0.01 * err2;
        if deno <= 0.0 {
            deno = 1.0;
        }
        let err = h * err * (1.0 / (N as f64 * deno)).sqrt();

        let fac11 = err.powf(expo1);
        let fac = (fac11 / fac_old.powf(BETA) / SAFE).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
        let mut h_new = h / fac;

        if !(err <= 1.0) {
            sol.stats.rejected += 1;
            last_rejected = true;
            h = if err.is_finite() {
                h / (fac11 / SAFE).min(1.0 / FAC_MIN)
            } else {
                h * FAC_MIN
            };
            continue;
        }

        fac_old = err.max(1e-4);
        sol.stats.steps += 1;
        let k13 = rhs.call(s_new, &y_new)?;

        let mut cont = [[0.0; N]; 8];
        let ks = [&k1, &k6, &k7, &k8, &k9, &k10, &k11, &k12];
        for i in 0..N {
            let ydiff = y_new[i] - y[i];
            let bspl = hs * k1[i] - ydiff;
            cont[0][i] = y[i];
            cont[1][i] = ydiff;
            cont[2][i] = bspl;
            cont[3][i] = ydiff - hs * k13[i] - bspl;
            for (row, d) in [(4, &D4), (5, &D5), (6, &D6), (7, &D7)] {
                cont[row][i] = ks.iter().zip(d.iter()).map(|(k, c)| c * k[i]).sum();
            }
        }
        let k14 = rhs.call(
            s + C14 * hs,
            &combo(
                &y,
                hs,
                &[
                    (A141, &k1),
                    (A147, &k7),
                    (A148, &k8),
                    (A149, &k9),
                    (A1410, &k10),
                    (A1411, &k11),
                    (A1412, &k12),
                    (A1413, &k13),
                ],
            ),
        )?;
        let k15 = rhs.call(
            s + C15 * hs,
            &combo(
                &y,
                hs,
                &[
                    (A151, &k1),
                    (A156, &k6),
                    (A157, &k7),
                    (A158, &k8),
                    (A1511, &k11),
                    (A1512, &k12),
                    (A1513, &k13),
                    (A1514, &k14),
                ],
            ),
        )?;
        let k16 = rhs.call(
            s + C16 * hs,
            &combo(
                &y,
                hs,
                &[
                    (A161, &k1),
                    (A166, &k6),
                    (A167, &k7),
                    (A168, &k8),
                    (A169, &k9),
                    (A1613, &k13),
                    (A1614, &k14),
                    (A1615, &k15),
                ],
            ),
        )?;
        for i in 0..N {
            for (row, d) in [(4, &D4), (5, &D5), (6, &D6), (7, &D7)] {
                cont[row][i] = hs
                    * (cont[row][i]
                        + d[8] * k13[i]
                        + d[9] * k14[i]
                        + d[10] * k15[i]
                        + d[11] * k16[i]);
            }
        }
        let segment = DenseSegment { s0: s, h: hs, cont };

        // Events, earliest first.
        let g_new: Vec<f64> = events.iter().map(|ev| ev.eval(s_new, &y_new)).collect();
        let mut found: Vec<Located<N>> = Vec::new();
        for (idx, ev) in events.iter().enumerate() {
            let (w_lo, w_hi) = ev.window;
            let (lo, hi) = if dir > 0.0 { (s, s_new) } else { (s_new, s) };
            let a = lo.max(w_lo);
            let b = hi.min(w_hi);
            if !(a < b) {
                continue;
            }
            let g_at = |x: f64| ev.eval(x, &segment.eval(x));
            // Endpoints in integration order.
            let (p, q) = if dir > 0.0 { (a, b) } else { (b, a) };
            let gp = if p == s { g_prev[idx] } else { g_at(p) };
            let gq = if q == s_new { g_new[idx] } else { g_at(q) };
            if !ev.direction.admits(gp, gq) {
                continue;
            }
            let mut root = if gq == 0.0 {
                q
            } else {
                locate_root(p, gp, q, gq, opts.event_tol, g_at)
            };
            let mut y_root = segment.eval(root);
            if let EventKind::Linear { weights, .. } = &ev.kind {
                if let Ok(dy) = rhs.call(root, &y_root) {
                    let slope: f64 = weights.iter().zip(&dy).map(|(w, d)| w * d).sum();
                    let g = ev.eval(root, &y_root);
                    if slope != 0.0 {
                        let refined = root - g / slope;
                        if (refined - a) * (refined - b) <= 0.0
                            && (refined - root).abs() <= 10.0 * opts.event_tol.max(1e-300)
                        {
                            root = refined;
                            y_root = segment.eval(root);
                        }
                    }
                }
            }
            found.push(Located {
                index: idx,
                s: root,
                y: y_root,
            });
        }
        found.sort_by(|a, b| (dir * a.s).total_cmp(&(dir * b.s)));
        sol.segments.push(segment);

        let mut stop: Option<usize> = None;
        for hit in found {
            sol.events.push(EventHit {
                index: hit.index,
                name: events[hit.index].name.clone(),
                s: hit.s,
                y: hit.y,
            });
            if events[hit.index].terminal {
                sol.s.push(hit.s);
                sol.y.push(hit.y);
                stop = Some(hit.index);
                break;
            }
        }
        if let Some(idx) = stop {
            return Ok(Some(idx));
        }

        sol.s.push(s_new);
        sol.y.push(y_new);
        g_prev = g_new;
        k1 = k13;
        s = s_new;
        y = y_new;
        if last {
            return Ok(None);
        }
        h_new = h_new.min(opts.max_step);
        if last_rejected {
            h_new = h_new.min(h);
        }
        last_rejected = false;
        h = h_new;
    }
}
