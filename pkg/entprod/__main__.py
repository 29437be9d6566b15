from entprod.cli import main

raise SystemExit(main())
