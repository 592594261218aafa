from pipeslack.par.pipeslackpar import PipeSlackPar
